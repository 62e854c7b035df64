// 3D preview: skeleton rendering, clip playback, difference markers, and
// camera placement from the service's suggested viewpoint with free orbit
// navigation on top.

import * as THREE from "three";

import type { AnimationDoc, FrameDoc, MarkerDoc, SkeletonJoint, ViewpointDoc } from "./types.js";

const JOINT_RADIUS = 0.022;
const BONE_COLOR = 0x9aa7b8;
const JOINT_COLOR = 0x5b6b7d;
const SELECT_COLOR = 0xe36b12;
const WRONG_COLOR = 0xd64550;
const CORRECT_COLOR = 0x3fa34d;
const FIXED_COLOR = 0x46596e;

interface JointVisual {
  node: THREE.Object3D;
  sphere: THREE.Mesh;
  material: THREE.MeshLambertMaterial;
}

export class SkeletonRig {
  root: THREE.Group;
  joints: JointVisual[] = [];
  names: string[] = [];
  private bonePositions: THREE.BufferAttribute;
  private boneLines: THREE.LineSegments;
  private parents: (number | null)[] = [];

  constructor(skeleton: SkeletonJoint[]) {
    this.root = new THREE.Group();
    const sphereGeo = new THREE.SphereGeometry(JOINT_RADIUS, 12, 10);
    for (const def of skeleton) {
      const node = new THREE.Object3D();
      node.name = def.name;
      node.position.set(...def.offset);
      const material = new THREE.MeshLambertMaterial({ color: JOINT_COLOR });
      const sphere = new THREE.Mesh(sphereGeo, material);
      sphere.userData.joint = def.name;
      node.add(sphere);
      if (def.parent === null) {
        this.root.add(node);
      } else {
        this.joints[def.parent].node.add(node);
      }
      this.joints.push({ node, sphere, material });
      this.names.push(def.name);
      this.parents.push(def.parent);
    }
    const segs = skeleton.filter((d) => d.parent !== null).length;
    this.bonePositions = new THREE.BufferAttribute(new Float32Array(segs * 2 * 3), 3);
    const geo = new THREE.BufferGeometry();
    geo.setAttribute("position", this.bonePositions);
    this.boneLines = new THREE.LineSegments(
      geo,
      new THREE.LineBasicMaterial({ color: BONE_COLOR })
    );
    this.boneLines.frustumCulled = false;
  }

  addTo(scene: THREE.Scene): void {
    scene.add(this.root);
    scene.add(this.boneLines);
  }

  removeFrom(scene: THREE.Scene): void {
    scene.remove(this.root);
    scene.remove(this.boneLines);
  }

  applyFrame(frame: FrameDoc, translationOffset: THREE.Vector3): void {
    for (let i = 0; i < this.joints.length; i++) {
      const [w, x, y, z] = frame.q[i];
      this.joints[i].node.quaternion.set(x, y, z, w);
    }
    const rootNode = this.joints[0].node;
    rootNode.position.set(
      frame.t[0] - translationOffset.x,
      frame.t[1] - translationOffset.y,
      frame.t[2] - translationOffset.z
    );
    this.refreshBones();
  }

  applyTPose(): void {
    for (const j of this.joints) j.node.quaternion.identity();
    this.refreshBones();
  }

  refreshBones(): void {
    this.root.updateMatrixWorld(true);
    const a = new THREE.Vector3();
    const b = new THREE.Vector3();
    let k = 0;
    for (let i = 0; i < this.joints.length; i++) {
      const p = this.parents[i];
      if (p === null) continue;
      this.joints[i].node.getWorldPosition(a);
      this.joints[p].node.getWorldPosition(b);
      this.bonePositions.setXYZ(k++, a.x, a.y, a.z);
      this.bonePositions.setXYZ(k++, b.x, b.y, b.z);
    }
    this.bonePositions.needsUpdate = true;
  }

  worldPosition(name: string): THREE.Vector3 {
    const idx = this.names.indexOf(name);
    const out = new THREE.Vector3();
    this.joints[idx].node.getWorldPosition(out);
    return out;
  }

  setHighlight(selected: string[]): void {
    for (const j of this.joints) j.material.color.setHex(JOINT_COLOR);
    for (const name of selected) {
      const idx = this.names.indexOf(name);
      if (idx >= 0) this.joints[idx].material.color.setHex(SELECT_COLOR);
    }
  }
}

class OrbitState {
  azimuth = 0;
  elevation = 0.2;
  distance = 4;
  target = new THREE.Vector3();

  fromViewpoint(vp: ViewpointDoc, target: THREE.Vector3): void {
    this.target.copy(target);
    this.distance = vp.distance;
    const cam = new THREE.Vector3(-vp.dir[0], -vp.dir[1], -vp.dir[2]);
    this.azimuth = Math.atan2(cam.x, cam.z);
    this.elevation = Math.asin(Math.min(Math.max(cam.y, -1), 1));
  }

  apply(camera: THREE.PerspectiveCamera): void {
    const r = this.distance;
    const y = r * Math.sin(this.elevation);
    const h = r * Math.cos(this.elevation);
    camera.position.set(
      this.target.x + h * Math.sin(this.azimuth),
      this.target.y + y,
      this.target.z + h * Math.cos(this.azimuth)
    );
    camera.up.set(0, 1, 0);
    camera.lookAt(this.target);
  }
}

export class Viewer {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer;
  private orbit = new OrbitState();
  private rig: SkeletonRig | null = null;
  private markerGroup = new THREE.Group();
  private frames: FrameDoc[] = [];
  private fps = 30;
  private holdFrames = 0;
  private startTime = 0;
  private playing = false;
  private translationOffset = new THREE.Vector3();
  onJointPick: ((joint: string) => void) | null = null;

  constructor(private canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.camera = new THREE.PerspectiveCamera(40, 1, 0.05, 100);
    this.scene.background = new THREE.Color(0xf4f6f8);
    this.scene.add(new THREE.AmbientLight(0xffffff, 1.1));
    const sun = new THREE.DirectionalLight(0xffffff, 1.6);
    sun.position.set(2, 4, 3);
    this.scene.add(sun);
    const grid = new THREE.GridHelper(4, 16, 0xc3ccd6, 0xdbe2ea);
    this.scene.add(grid);
    this.scene.add(this.markerGroup);
    this.bindPointer();
    this.resize();
    const loop = (t: number) => {
      this.tick(t);
      requestAnimationFrame(loop);
    };
    requestAnimationFrame(loop);
  }

  resize(): void {
    const w = this.canvas.clientWidth || 640;
    const h = this.canvas.clientHeight || 420;
    this.renderer.setSize(w, h, false);
    this.camera.aspect = w / h;
    this.camera.updateProjectionMatrix();
  }

  private bindPointer(): void {
    let dragging = false;
    let moved = 0;
    let lastX = 0;
    let lastY = 0;
    this.canvas.addEventListener("pointerdown", (e) => {
      dragging = true;
      moved = 0;
      lastX = e.clientX;
      lastY = e.clientY;
      this.canvas.setPointerCapture(e.pointerId);
    });
    this.canvas.addEventListener("pointermove", (e) => {
      if (!dragging) return;
      const dx = e.clientX - lastX;
      const dy = e.clientY - lastY;
      moved += Math.abs(dx) + Math.abs(dy);
      lastX = e.clientX;
      lastY = e.clientY;
      this.orbit.azimuth -= dx * 0.008;
      this.orbit.elevation = Math.min(
        Math.max(this.orbit.elevation + dy * 0.006, -1.4),
        1.4
      );
      this.orbit.apply(this.camera);
    });
    this.canvas.addEventListener("pointerup", (e) => {
      dragging = false;
      if (moved < 6) this.pick(e);
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.orbit.distance = Math.min(
        Math.max(this.orbit.distance * (1 + e.deltaY * 0.001), 0.8),
        20
      );
      this.orbit.apply(this.camera);
    });
  }

  private pick(e: PointerEvent): void {
    if (!this.rig || !this.onJointPick) return;
    // snap the click to the nearest joint in screen space
    const rect = this.canvas.getBoundingClientRect();
    const px = e.clientX - rect.left;
    const py = e.clientY - rect.top;
    const v = new THREE.Vector3();
    let best: string | null = null;
    let bestDist = 30; // pixel snap radius
    for (const name of this.rig.names) {
      v.copy(this.rig.worldPosition(name)).project(this.camera);
      const sx = ((v.x + 1) / 2) * rect.width;
      const sy = ((1 - v.y) / 2) * rect.height;
      const d = Math.hypot(sx - px, sy - py);
      if (d < bestDist) {
        bestDist = d;
        best = name;
      }
    }
    if (best) this.onJointPick(best);
  }

  showSkeleton(skeleton: SkeletonJoint[]): SkeletonRig {
    if (this.rig) {
      this.rig.removeFrom(this.scene);
    }
    this.markerGroup.clear();
    this.rig = new SkeletonRig(skeleton);
    this.rig.addTo(this.scene);
    return this.rig;
  }

  showTPose(skeleton: SkeletonJoint[]): SkeletonRig {
    const rig = this.showSkeleton(skeleton);
    this.frames = [];
    this.playing = false;
    rig.applyTPose();
    // stand the model on the grid
    rig.root.updateMatrixWorld(true);
    let minY = Infinity;
    for (const name of rig.names) minY = Math.min(minY, rig.worldPosition(name).y);
    rig.joints[0].node.position.y -= minY - JOINT_RADIUS;
    rig.refreshBones();
    const target = rig.worldPosition("pelvis");
    this.orbit.target.copy(target);
    this.orbit.distance = 3.2;
    this.orbit.azimuth = 0;
    this.orbit.elevation = 0.1;
    this.orbit.apply(this.camera);
    return rig;
  }

  playAnimation(doc: AnimationDoc): void {
    const rig = this.showSkeleton(doc.skeleton);
    this.frames = doc.frames;
    this.fps = doc.fps;
    this.holdFrames = doc.holdFrames;
    this.playing = true;
    this.startTime = performance.now();
    const first = doc.frames[0];
    // keep the clip near the origin regardless of where in the run it sits
    this.translationOffset.set(first.t[0], 0, first.t[2]);
    rig.applyFrame(first, this.translationOffset);
    const target = rig.worldPosition("pelvis");
    this.orbit.fromViewpoint(doc.viewpoint, target);
    this.orbit.apply(this.camera);
    this.showMarker(doc.marker);
  }

  private showMarker(marker: MarkerDoc): void {
    this.markerGroup.clear();
    const off = this.translationOffset;
    const at = (p: [number, number, number]) =>
      new THREE.Vector3(p[0] - off.x, p[1] - off.y, p[2] - off.z);

    const line = (a: THREE.Vector3, b: THREE.Vector3, color: number) => {
      const geo = new THREE.BufferGeometry().setFromPoints([a, b]);
      this.markerGroup.add(new THREE.Line(geo, new THREE.LineBasicMaterial({ color })));
    };
    const dot = (p: THREE.Vector3, color: number) => {
      const mesh = new THREE.Mesh(
        new THREE.SphereGeometry(JOINT_RADIUS * 1.4, 12, 10),
        new THREE.MeshLambertMaterial({ color })
      );
      mesh.position.copy(p);
      this.markerGroup.add(mesh);
    };

    if (marker.kind === "angular") {
      const vertex = at(marker.vertex);
      line(vertex, at(marker.armFixed), FIXED_COLOR);
      line(vertex, at(marker.armWrong), WRONG_COLOR);
      line(vertex, at(marker.armCorrect), CORRECT_COLOR);
      dot(at(marker.armWrong), WRONG_COLOR);
      dot(at(marker.armCorrect), CORRECT_COLOR);
    } else if (marker.kind === "positional") {
      const wrong = at(marker.wrong);
      const correct = at(marker.correct);
      dot(wrong, WRONG_COLOR);
      dot(correct, CORRECT_COLOR);
      const dir = correct.clone().sub(wrong);
      const len = dir.length();
      if (len > 1e-6) {
        this.markerGroup.add(
          new THREE.ArrowHelper(dir.normalize(), wrong, len, WRONG_COLOR, len * 0.25, len * 0.12)
        );
      }
    }
    // temporal and categorical markers render on the 2D panel, not in 3D
  }

  private tick(t: number): void {
    if (this.playing && this.rig && this.frames.length >= 2) {
      const total = this.frames.length + this.holdFrames;
      const frame = Math.floor(((t - this.startTime) / 1000) * this.fps) % total;
      const idx = Math.min(frame, this.frames.length - 1);
      this.rig.applyFrame(this.frames[idx], this.translationOffset);
    }
    this.renderer.render(this.scene, this.camera);
  }
}
