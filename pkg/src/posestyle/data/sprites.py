"""Procedural "sprite person" samples: image + keypoints + 8-class segmap.

A sprite is a stick figure rendered from capsules (thick segments with round
caps) and a head disk. Rendering is deterministic, hard-edged (no
anti-aliasing), and paints the exact segmentation for free: the label of a
pixel is the topmost part covering it, and its color comes from that part's
texture. Joints are the exact positions used to build the capsules.

Coordinates are pixel-index space: pixel (row=i, col=j) has center
(x=j, y=i); x grows rightward, y grows downward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..images import quantize01

PART_CLASSES = ("background", "upper_clothes", "pants", "skirt",
                "hair", "face", "arm", "leg")
GARMENT_PARTS = ("upper_clothes", "pants", "skirt")
FOREGROUND_PARTS = PART_CLASSES[1:]
TEXTURE_KINDS = ("flat", "stripes", "checker")

BACKGROUND_RGB = (0.93, 0.93, 0.93)

JOINT_NAMES = (
    "nose", "neck",
    "right_shoulder", "right_elbow", "right_wrist",
    "left_shoulder", "left_elbow", "left_wrist",
    "right_hip", "right_knee", "right_ankle",
    "left_hip", "left_knee", "left_ankle",
    "right_eye", "left_eye", "right_ear", "left_ear",
)
NUM_JOINTS = len(JOINT_NAMES)

# Limb segments whose direction PoseParams controls. Angles are measured in
# the body frame from "straight down"; positive swings outward (mirrored
# between sides). Bounds are the anatomically plausible range accepted by
# generate_sprite; sample_dataset draws from tighter ranges below.
ANGLE_BOUNDS = {
    "right_upper_arm": (-0.20, 0.90),
    "right_forearm": (-0.35, 0.75),
    "left_upper_arm": (-0.20, 0.90),
    "left_forearm": (-0.35, 0.75),
    "right_thigh": (-0.20, 0.45),
    "right_shin": (-0.25, 0.40),
    "left_thigh": (-0.20, 0.45),
    "left_shin": (-0.25, 0.40),
}

NEUTRAL_ANGLES = {
    "right_upper_arm": 0.25, "right_forearm": 0.15,
    "left_upper_arm": 0.25, "left_forearm": 0.15,
    "right_thigh": 0.08, "right_shin": 0.02,
    "left_thigh": 0.08, "left_shin": 0.02,
}

# Body proportions as fractions of the scale unit S = body_scale * min(H, W).
P = {
    "torso_len": 0.27,
    "torso_rad": 0.135,
    "head_offset": 0.085,
    "head_rad": 0.105,
    "hair_line": 0.045,       # head-local height above which the hair cap starts
    "shoulder_half": 0.16,
    "shoulder_drop": 0.02,
    "hip_half": 0.09,
    "upper_arm": 0.15,
    "forearm": 0.14,
    "arm_rad": 0.035,
    "thigh": 0.18,
    "shin": 0.17,
    "pants_rad": 0.048,
    "pants_shin_rad": 0.044,
    "pants_shin_frac": 0.55,  # fraction of the shin covered by trousers
    "leg_rad": 0.038,
    "skirt_len": 0.05,
    "skirt_rad": 0.115,
    "eye_up": 0.025,
    "eye_half": 0.04,
    "ear_half": 0.095,
}

# For the segmap/keypoint consistency property: the part classes a visible
# joint may land on, given the draw order below.
JOINT_REGION_CLASSES = {
    "nose": {"face"},
    "neck": {"face", "hair", "upper_clothes"},
    "right_shoulder": {"arm", "upper_clothes"},
    "left_shoulder": {"arm", "upper_clothes"},
    "right_elbow": {"arm", "upper_clothes"},
    "left_elbow": {"arm", "upper_clothes"},
    "right_wrist": {"arm", "upper_clothes", "skirt", "pants"},
    "left_wrist": {"arm", "upper_clothes", "skirt", "pants"},
    "right_hip": {"upper_clothes", "pants", "skirt"},
    "left_hip": {"upper_clothes", "pants", "skirt"},
    "right_knee": {"pants", "skirt", "leg"},
    "left_knee": {"pants", "skirt", "leg"},
    "right_ankle": {"leg", "pants"},
    "left_ankle": {"leg", "pants"},
    "right_eye": {"face", "hair"},
    "left_eye": {"face", "hair"},
    "right_ear": {"face", "hair"},
    "left_ear": {"face", "hair"},
}


class SpriteError(ValueError):
    pass


@dataclass
class SpriteSpec:
    """Appearance attributes: a color and texture per foreground part."""

    part_colors: dict = field(default_factory=dict)
    texture_kinds: dict = field(default_factory=dict)
    body_scale: float = 1.0

    def validate(self):
        for part in FOREGROUND_PARTS:
            if part not in self.part_colors:
                raise SpriteError(f"missing color for part '{part}'")
            rgb = self.part_colors[part]
            if len(rgb) != 3 or not all(0.0 <= c <= 1.0 for c in rgb):
                raise SpriteError(f"color for '{part}' must be an RGB triple in [0,1]")
            kind = self.texture_kinds.get(part, "flat")
            if kind not in TEXTURE_KINDS:
                raise SpriteError(f"unknown texture kind '{kind}' for '{part}'")
        if not 0.5 <= self.body_scale <= 1.5:
            raise SpriteError(f"body_scale {self.body_scale} outside [0.5, 1.5]")

    def kind(self, part):
        return self.texture_kinds.get(part, "flat")

    def to_dict(self):
        return {"part_colors": {k: list(map(float, v)) for k, v in self.part_colors.items()},
                "texture_kinds": dict(self.texture_kinds),
                "body_scale": float(self.body_scale)}

    @classmethod
    def from_dict(cls, d):
        return cls(part_colors={k: tuple(v) for k, v in d["part_colors"].items()},
                   texture_kinds=dict(d.get("texture_kinds", {})),
                   body_scale=float(d["body_scale"]))


@dataclass
class PoseParams:
    joint_angles: dict = field(default_factory=lambda: dict(NEUTRAL_ANGLES))
    root_position: tuple = (0.5, 0.53)
    root_orientation: float = 0.0

    def validate(self):
        for name, (lo, hi) in ANGLE_BOUNDS.items():
            a = self.joint_angles.get(name, NEUTRAL_ANGLES[name])
            if not lo <= a <= hi:
                raise SpriteError(f"angle '{name}'={a} outside plausible bounds [{lo}, {hi}]")
        x, y = self.root_position
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise SpriteError(f"root_position {self.root_position} outside [0,1]^2")
        if not -0.35 <= self.root_orientation <= 0.35:
            raise SpriteError("root_orientation outside [-0.35, 0.35]")

    def angle(self, name):
        return self.joint_angles.get(name, NEUTRAL_ANGLES[name])

    def to_dict(self):
        return {"joint_angles": {k: float(v) for k, v in self.joint_angles.items()},
                "root_position": [float(self.root_position[0]), float(self.root_position[1])],
                "root_orientation": float(self.root_orientation)}

    @classmethod
    def from_dict(cls, d):
        return cls(joint_angles=dict(d["joint_angles"]),
                   root_position=tuple(d["root_position"]),
                   root_orientation=float(d["root_orientation"]))

    @classmethod
    def neutral(cls):
        return cls()


@dataclass
class Sample:
    image: np.ndarray      # (3, H, W) float32 in [-1, 1]
    keypoints: np.ndarray  # (18, 3) float64 rows of (x, y, visible)
    segmap: np.ndarray     # (H, W) uint8 labels in 0..7
    id: str
    meta: dict | None = None

    @property
    def size(self):
        return self.segmap.shape


def _rot(vec, angle):
    c, s = math.cos(angle), math.sin(angle)
    return (c * vec[0] - s * vec[1], s * vec[0] + c * vec[1])


def _skeleton(pose: PoseParams, size, body_scale):
    """Joint positions (dict name -> (x, y)) plus the body frame vectors."""
    h, w = size
    s = body_scale * min(h, w)
    rx, ry = pose.root_position[0] * (w - 1), pose.root_position[1] * (h - 1)
    root = (rx, ry)
    down = _rot((0.0, 1.0), pose.root_orientation)
    up = (-down[0], -down[1])
    # perpendicular pointing to the image right when orientation is 0
    perp = (-down[1], down[0])

    def walk(start, direction, length):
        return (start[0] + direction[0] * length, start[1] + direction[1] * length)

    j = {}
    neck = walk(root, up, P["torso_len"] * s)
    j["neck"] = neck
    head_c = walk(neck, up, P["head_offset"] * s)
    j["nose"] = head_c
    j["right_eye"] = walk(walk(head_c, up, P["eye_up"] * s), perp, P["eye_half"] * s)
    j["left_eye"] = walk(walk(head_c, up, P["eye_up"] * s), perp, -P["eye_half"] * s)
    j["right_ear"] = walk(head_c, perp, P["ear_half"] * s)
    j["left_ear"] = walk(head_c, perp, -P["ear_half"] * s)

    sho_base = walk(neck, down, P["shoulder_drop"] * s)
    j["right_shoulder"] = walk(sho_base, perp, P["shoulder_half"] * s)
    j["left_shoulder"] = walk(sho_base, perp, -P["shoulder_half"] * s)
    j["right_hip"] = walk(root, perp, P["hip_half"] * s)
    j["left_hip"] = walk(root, perp, -P["hip_half"] * s)

    for side, sgn in (("right", 1.0), ("left", -1.0)):
        ua = _rot((0.0, 1.0), pose.root_orientation + sgn * pose.angle(f"{side}_upper_arm"))
        fa = _rot((0.0, 1.0), pose.root_orientation + sgn * pose.angle(f"{side}_forearm"))
        j[f"{side}_elbow"] = walk(j[f"{side}_shoulder"], ua, P["upper_arm"] * s)
        j[f"{side}_wrist"] = walk(j[f"{side}_elbow"], fa, P["forearm"] * s)
        th = _rot((0.0, 1.0), pose.root_orientation + sgn * pose.angle(f"{side}_thigh"))
        sh = _rot((0.0, 1.0), pose.root_orientation + sgn * pose.angle(f"{side}_shin"))
        j[f"{side}_knee"] = walk(j[f"{side}_hip"], th, P["thigh"] * s)
        j[f"{side}_ankle"] = walk(j[f"{side}_knee"], sh, P["shin"] * s)

    frame = {"root": root, "up": up, "down": down, "perp": perp,
             "head_center": head_c, "unit": s}
    return j, frame


def _capsule_mask(xx, yy, p0, p1, radius):
    """Pixels whose center lies within `radius` of segment p0-p1."""
    vx, vy = p1[0] - p0[0], p1[1] - p0[1]
    dx, dy = xx - p0[0], yy - p0[1]
    seg_len2 = vx * vx + vy * vy
    if seg_len2 == 0.0:
        d2 = dx * dx + dy * dy
    else:
        t = np.clip((dx * vx + dy * vy) / seg_len2, 0.0, 1.0)
        ex, ey = dx - t * vx, dy - t * vy
        d2 = ex * ex + ey * ey
    return d2 <= radius * radius


def _lerp(p0, p1, t):
    return (p0[0] + (p1[0] - p0[0]) * t, p0[1] + (p1[1] - p0[1]) * t)


def _paint_labels(size, joints, frame):
    """Rasterize the part label grid in back-to-front order."""
    h, w = size
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    s = frame["unit"]
    labels = np.zeros((h, w), dtype=np.uint8)

    def paint(mask, part):
        labels[mask] = PART_CLASSES.index(part)

    for side in ("right", "left"):
        knee, ankle = joints[f"{side}_knee"], joints[f"{side}_ankle"]
        paint(_capsule_mask(xx, yy, knee, ankle, P["leg_rad"] * s), "leg")
    for side in ("right", "left"):
        hip, knee, ankle = joints[f"{side}_hip"], joints[f"{side}_knee"], joints[f"{side}_ankle"]
        paint(_capsule_mask(xx, yy, hip, knee, P["pants_rad"] * s), "pants")
        shin_end = _lerp(knee, ankle, P["pants_shin_frac"])
        paint(_capsule_mask(xx, yy, knee, shin_end, P["pants_shin_rad"] * s), "pants")
    root = frame["root"]
    skirt_end = (root[0] + frame["down"][0] * P["skirt_len"] * s,
                 root[1] + frame["down"][1] * P["skirt_len"] * s)
    paint(_capsule_mask(xx, yy, root, skirt_end, P["skirt_rad"] * s), "skirt")
    paint(_capsule_mask(xx, yy, joints["neck"], root, P["torso_rad"] * s), "upper_clothes")
    for side in ("right", "left"):
        sho, elb, wri = joints[f"{side}_shoulder"], joints[f"{side}_elbow"], joints[f"{side}_wrist"]
        paint(_capsule_mask(xx, yy, sho, elb, P["arm_rad"] * s), "arm")
        paint(_capsule_mask(xx, yy, elb, wri, P["arm_rad"] * s), "arm")
    head_c = frame["head_center"]
    head = _capsule_mask(xx, yy, head_c, head_c, P["head_rad"] * s)
    paint(head, "face")
    up = frame["up"]
    head_height = (xx - head_c[0]) * up[0] + (yy - head_c[1]) * up[1]
    paint(head & (head_height >= P["hair_line"] * s), "hair")
    return labels


def _shade(rgb):
    return tuple(0.45 * c for c in rgb)


def _render_image(labels, spec: SpriteSpec, frame, size):
    """Color each labeled region by its part texture; quantized to 8 bits."""
    h, w = size
    img8 = np.empty((h, w, 3), dtype=np.uint8)
    img8[...] = [quantize01(c) for c in BACKGROUND_RGB]
    yy, xx = np.mgrid[0:h, 0:w]
    # texture phase anchored to the sprite so integer shifts move the pattern
    ux = np.floor(xx - round(frame["root"][0])).astype(np.int64)
    vy = np.floor(yy - round(frame["root"][1])).astype(np.int64)
    band = max(2, int(round(0.07 * frame["unit"])))
    for k, part in enumerate(PART_CLASSES):
        if k == 0:
            continue
        mask = labels == k
        if not mask.any():
            continue
        base = spec.part_colors[part]
        kind = spec.kind(part)
        if kind == "flat":
            img8[mask] = [quantize01(c) for c in base]
            continue
        alt = _shade(base)
        if kind == "stripes":
            pattern = (vy // band) % 2 == 1
        else:  # checker
            pattern = ((xx // band) + (vy // band)) % 2 == 1
        for sel, rgb in ((mask & ~pattern, base), (mask & pattern, alt)):
            img8[sel] = [quantize01(c) for c in rgb]
    return img8


def generate_sprite(spec: SpriteSpec, pose: PoseParams, size, sample_id="sprite-0"):
    """Render one sample. Deterministic for fixed inputs.

    `size` is (H, W); both must be multiples of 16 so the encoders'
    downsampling stages land on exact sizes.
    """
    h, w = size
    if h % 16 or w % 16:
        raise SpriteError(f"size {size} must be divisible by 16")
    spec.validate()
    pose.validate()
    joints, frame = _skeleton(pose, size, spec.body_scale)
    labels = _paint_labels(size, joints, frame)
    img8 = _render_image(labels, spec, frame, size)
    image = (img8.astype(np.float32) / 127.5 - 1.0).transpose(2, 0, 1)
    kp = np.zeros((NUM_JOINTS, 3), dtype=np.float64)
    for i, name in enumerate(JOINT_NAMES):
        x, y = joints[name]
        visible = 0.0 <= x < w and 0.0 <= y < h
        kp[i] = (x, y, 1.0 if visible else 0.0)
    meta = {"spec": spec.to_dict(), "pose": pose.to_dict()}
    return Sample(image=image, keypoints=kp, segmap=labels, id=sample_id, meta=meta)


# Ranges used by sample_dataset; tighter than ANGLE_BOUNDS so sampled
# sprites stay fully inside the frame.
SAMPLING = {
    "body_scale": (0.72, 1.02),
    "root_x": (0.44, 0.56),
    "root_y": (0.50, 0.56),
    "orientation": (-0.10, 0.10),
    "color": (0.08, 0.95),
    "angles": {
        "right_upper_arm": (0.05, 0.65), "left_upper_arm": (0.05, 0.65),
        "right_forearm": (-0.15, 0.55), "left_forearm": (-0.15, 0.55),
        "right_thigh": (-0.05, 0.30), "left_thigh": (-0.05, 0.30),
        "right_shin": (-0.12, 0.25), "left_shin": (-0.12, 0.25),
    },
}


def _sample_spec(rng) -> SpriteSpec:
    lo, hi = SAMPLING["color"]
    colors = {part: tuple(rng.uniform(lo, hi, size=3)) for part in FOREGROUND_PARTS}
    kinds = {}
    for part in FOREGROUND_PARTS:
        if part in GARMENT_PARTS:
            kinds[part] = TEXTURE_KINDS[rng.integers(0, len(TEXTURE_KINDS))]
        else:
            kinds[part] = "flat"
    scale = rng.uniform(*SAMPLING["body_scale"])
    return SpriteSpec(part_colors=colors, texture_kinds=kinds, body_scale=scale)


def _sample_pose(rng) -> PoseParams:
    angles = {name: rng.uniform(lo, hi) for name, (lo, hi) in SAMPLING["angles"].items()}
    return PoseParams(
        joint_angles=angles,
        root_position=(rng.uniform(*SAMPLING["root_x"]), rng.uniform(*SAMPLING["root_y"])),
        root_orientation=rng.uniform(*SAMPLING["orientation"]),
    )


def sample_dataset(n, seed, size=(64, 64)):
    """Draw n reproducible samples; ids are unique within the dataset."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    samples = []
    for i in range(n):
        spec = _sample_spec(rng)
        pose = _sample_pose(rng)
        sid = f"s{seed:04d}_{i:05d}"
        samples.append(generate_sprite(spec, pose, size, sample_id=sid))
    return samples
