"""SLIC superpixels and their reduction to a fixed-size DBM input grid.

Centers are carried as float arrays of shape (K, 6) with columns
``l, a, b, x, y, count`` (see ``ClusterCenter`` for a single row).
Coordinates are pixel indices: x is the column, y the row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from skimage.measure import label as connected_components

from scenedbm.netpbm import Image

L, A, B, X, Y, COUNT = range(6)

# sRGB primaries to XYZ; D65 white is the image of RGB (1, 1, 1) so grays map to a = b = 0
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_WHITE = _RGB_TO_XYZ.sum(axis=1)
_EPS = 216 / 24389
_KAPPA = 24389 / 27


@dataclass
class LabImage:
    """CIELAB raster of shape (height, width, 3)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ValueError(f"Lab data must be (H, W, 3), got {data.shape}")
        if data[..., 0].min() < -1e-9 or data[..., 0].max() > 100 + 1e-6:
            raise ValueError("luminance outside [0, 100]")
        self.data = data

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass
class ClusterCenter:
    l: float
    a: float
    b: float
    x: float
    y: float
    count: int = 0

    @classmethod
    def from_row(cls, row) -> ClusterCenter:
        return cls(float(row[L]), float(row[A]), float(row[B]), float(row[X]), float(row[Y]), int(row[COUNT]))

    def as_row(self) -> np.ndarray:
        return np.array([self.l, self.a, self.b, self.x, self.y, self.count], dtype=np.float64)


@dataclass
class SlicConfig:
    k: int
    compactness: float = 10.0
    residual_threshold: float = 1.0
    max_iters: int = 10
    jitter: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.compactness > 0:
            raise ValueError("compactness must be > 0")
        if self.residual_threshold < 0:
            raise ValueError("residual_threshold must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class SuperpixelMap:
    labels: np.ndarray
    centers: np.ndarray
    iterations_used: int
    final_residual: float
    residuals: list = field(default_factory=list)

    @property
    def n_superpixels(self) -> int:
        return len(self.centers)

    def center(self, i) -> ClusterCenter:
        return ClusterCenter.from_row(self.centers[i])


def rgb_to_lab(image: Image) -> LabImage:
    """sRGB (D65) to CIELAB. Single-channel images are treated as gray."""
    rgb = image.to_rgb().data.astype(np.float64) / 255.0
    linear = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _RGB_TO_XYZ.T / _WHITE
    f = np.where(xyz > _EPS, np.cbrt(xyz), (_KAPPA * xyz + 16) / 116)
    lab = np.empty_like(f)
    lab[..., 0] = 116 * f[..., 1] - 16
    lab[..., 1] = 500 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200 * (f[..., 1] - f[..., 2])
    lab[..., 0] = np.clip(lab[..., 0], 0.0, 100.0)
    return LabImage(lab)


def region_size(n_pixels: int, k: int) -> float:
    return math.sqrt(n_pixels / k)


def grid_shape(width: int, height: int, s: float) -> tuple[int, int]:
    """Number of S-wide cells across and down, (nx, ny)."""
    # guard against sqrt round-off turning an exact fit into an extra cell
    nx = max(1, math.ceil(width / s - 1e-9))
    ny = max(1, math.ceil(height / s - 1e-9))
    return nx, ny


def init_centers(lab: LabImage, cfg: SlicConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    h, w = lab.height, lab.width
    n = h * w
    if cfg.k > n:
        raise ValueError(f"more superpixels than pixels ({cfg.k} > {n})")
    s = region_size(n, cfg.k)
    nx, ny = grid_shape(w, h, s)
    if cfg.jitter and rng is None:
        rng = np.random.default_rng(cfg.seed)

    rows = []
    for j in range(ny):
        y0, y1 = j * s, min((j + 1) * s, h)
        for i in range(nx):
            x0, x1 = i * s, min((i + 1) * s, w)
            if cfg.jitter:
                fx, fy = rng.uniform(x0, x1), rng.uniform(y0, y1)
            else:
                fx, fy = (x0 + x1) / 2, (y0 + y1) / 2
            px = min(max(int(math.floor(fx)), math.ceil(x0)), w - 1)
            py = min(max(int(math.floor(fy)), math.ceil(y0)), h - 1)
            rows.append([*lab.data[py, px], px, py, 0])
    return np.array(rows, dtype=np.float64)


def gradient_map(lab: LabImage) -> np.ndarray:
    """Squared Lab central differences, horizontal plus vertical, edges clamped."""
    d = lab.data
    padded = np.pad(d, ((1, 1), (1, 1), (0, 0)), mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    return (gx ** 2).sum(axis=2) + (gy ** 2).sum(axis=2)


def perturb_to_lowest_gradient(center: ClusterCenter, lab: LabImage, grad: np.ndarray | None = None) -> ClusterCenter:
    """Move a center to the lowest-gradient pixel of its 3x3 neighbourhood.

    Candidates are scanned row-major and the first minimum wins.
    """
    if grad is None:
        grad = gradient_map(lab)
    h, w = grad.shape
    cx, cy = int(round(center.x)), int(round(center.y))
    if not (0 <= cx < w and 0 <= cy < h):
        raise ValueError("center outside the image")
    best = None
    for y in range(max(cy - 1, 0), min(cy + 2, h)):
        for x in range(max(cx - 1, 0), min(cx + 2, w)):
            if best is None or grad[y, x] < best[0]:
                best = (grad[y, x], x, y)
    _, x, y = best
    l, a, b = lab.data[y, x]
    return ClusterCenter(float(l), float(a), float(b), float(x), float(y), center.count)


def slic_distance(color, x, y, center: ClusterCenter, s: float, m: float) -> float:
    """Combined color/space distance sqrt(dc^2 + (ds/S)^2 m^2)."""
    dc2 = (color[0] - center.l) ** 2 + (color[1] - center.a) ** 2 + (color[2] - center.b) ** 2
    ds2 = (x - center.x) ** 2 + (y - center.y) ** 2
    return math.sqrt(dc2 + ds2 / (s * s) * m * m)


def compute_centers(lab: LabImage, labels: np.ndarray, n_labels: int, previous: np.ndarray | None = None) -> np.ndarray:
    """Mean (l, a, b, x, y) of each label's pixels; empty labels keep ``previous``."""
    h, w = labels.shape
    flat = labels.ravel()
    ok = flat >= 0
    idx = flat[ok]
    ys, xs = np.divmod(np.arange(h * w)[ok], w)
    feats = [lab.data[..., c].ravel()[ok] for c in range(3)] + [xs.astype(np.float64), ys.astype(np.float64)]
    counts = np.bincount(idx, minlength=n_labels).astype(np.float64)
    out = np.zeros((n_labels, 6)) if previous is None else previous.copy()
    nonempty = counts > 0
    for col, values in enumerate(feats):
        sums = np.bincount(idx, weights=values, minlength=n_labels)
        out[nonempty, col] = sums[nonempty] / counts[nonempty]
    out[:, COUNT] = counts
    return out


def assign_labels(lab: LabImage, centers: np.ndarray, s: float, m: float) -> np.ndarray:
    """Local k-means assignment within each center's 2S x 2S window.

    Pixels outside every window get label -1.
    """
    h, w = lab.height, lab.width
    k = len(centers)
    r = int(math.ceil(s)) + 1
    offs = np.arange(-r, r + 1)
    cx, cy = centers[:, X], centers[:, Y]
    xs = np.floor(cx).astype(np.int64)[:, None] + offs
    ys = np.floor(cy).astype(np.int64)[:, None] + offs
    okx = (xs >= 0) & (xs < w) & (np.abs(xs - cx[:, None]) <= s)
    oky = (ys >= 0) & (ys < h) & (np.abs(ys - cy[:, None]) <= s)

    ok = oky[:, :, None] & okx[:, None, :]
    kk, iy, ix = np.nonzero(ok)
    px, py = xs[kk, ix], ys[kk, iy]
    color = lab.data[py, px]
    dc2 = ((color - centers[kk, :3]) ** 2).sum(axis=1)
    ds2 = (px - cx[kk]) ** 2 + (py - cy[kk]) ** 2
    d2 = dc2 + ds2 * (m * m / (s * s))
    pix = py * w + px

    # nearest center per pixel, ties to the lowest center index
    best = np.full(h * w, np.inf)
    np.minimum.at(best, pix, d2)
    win = d2 == best[pix]
    labels = np.full(h * w, k, dtype=np.int64)
    np.minimum.at(labels, pix[win], kk[win])
    labels[labels == k] = -1
    return labels.reshape(h, w)


def assign_and_update(lab: LabImage, centers: np.ndarray, cfg: SlicConfig):
    """One SLIC pass: returns (labels, new centers, residual E)."""
    if len(centers) == 0:
        raise ValueError("no cluster centers")
    s = region_size(lab.height * lab.width, cfg.k)
    labels = assign_labels(lab, centers, s, cfg.compactness)
    new = compute_centers(lab, labels, len(centers), previous=centers)
    residual = float(np.abs(new[:, X] - centers[:, X]).sum() + np.abs(new[:, Y] - centers[:, Y]).sum())
    return labels, new, residual


def enforce_connectivity(labels: np.ndarray, centers, min_size: float | None = None) -> np.ndarray:
    """Make every label's pixel set 4-connected.

    Components below ``min_size`` (default S*S/4) and unassigned pixels (-1)
    are merged into the neighbouring component sharing the longest boundary,
    ties going to the lower label. Any remaining extra component of a label
    gets a fresh label numbered from ``len(centers)`` upwards.
    """
    labels = np.asarray(labels, dtype=np.int64)
    h, w = labels.shape
    k = len(centers)
    if min_size is None:
        min_size = (h * w / max(k, 1)) / 4

    comp = connected_components(labels, background=int(labels.min()) - 1, connectivity=1) - 1
    n = int(comp.max()) + 1
    flat_comp = comp.ravel()
    _, first_pix = np.unique(flat_comp, return_index=True)
    comp_label = labels.ravel()[first_pix]
    size = np.bincount(flat_comp, minlength=n)

    adj = [dict() for _ in range(n)]
    pairs = np.concatenate([
        np.stack([comp[:, :-1].ravel(), comp[:, 1:].ravel()], axis=1),
        np.stack([comp[:-1, :].ravel(), comp[1:, :].ravel()], axis=1),
    ])
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.concatenate([pairs, pairs[:, ::-1]])
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    for (p, q), c in zip(uniq.tolist(), counts.tolist()):
        adj[p][q] = c

    parent = list(range(n))

    def is_stray(c):
        return comp_label[c] < 0 or size[c] < min_size

    for s in sorted(range(n), key=lambda c: (size[c], c)):
        # only roots still carry adjacency; merged components are skipped
        if parent[s] != s or not is_stray(s) or not adj[s]:
            continue
        nbrs = list(adj[s].items())
        assigned = [(q, c) for q, c in nbrs if comp_label[q] >= 0]
        pool = assigned or nbrs
        t = min(pool, key=lambda qc: (-qc[1], comp_label[qc[0]], qc[0]))[0]
        for q, c in adj[s].items():
            if q == t:
                continue
            adj[t][q] = adj[t].get(q, 0) + c
            adj[q][t] = adj[q].get(t, 0) + c
            del adj[q][s]
        adj[t].pop(s, None)
        adj[s] = {}
        parent[s] = t
        size[t] += size[s]

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    roots = np.array([find(c) for c in range(n)])
    merged = comp_label[roots][comp]

    # merges can leave a label split across several components
    comp2 = connected_components(merged, background=int(merged.min()) - 1, connectivity=1) - 1
    flat2 = comp2.ravel()
    n2 = int(flat2.max()) + 1
    _, first2 = np.unique(flat2, return_index=True)
    label2 = merged.ravel()[first2]
    size2 = np.bincount(flat2, minlength=n2)
    keep = {}
    for c in range(n2):
        lbl = int(label2[c])
        if lbl not in keep or size2[c] > size2[keep[lbl]]:
            keep[lbl] = c
    fresh = max(k, int(merged.max()) + 1)
    relabel = label2.copy()
    for c in range(n2):
        if keep[int(label2[c])] != c:
            relabel[c] = fresh
            fresh += 1
    return relabel[comp2]


def run_slic(image: Image, cfg: SlicConfig) -> SuperpixelMap:
    lab = rgb_to_lab(image)
    return run_slic_lab(lab, cfg)


def run_slic_lab(lab: LabImage, cfg: SlicConfig) -> SuperpixelMap:
    rng = np.random.default_rng(cfg.seed)
    centers = init_centers(lab, cfg, rng)
    grad = gradient_map(lab)
    centers = np.array([
        perturb_to_lowest_gradient(ClusterCenter.from_row(c), lab, grad).as_row() for c in centers
    ])

    residuals = []
    labels = None
    for _ in range(cfg.max_iters):
        labels, centers, residual = assign_and_update(lab, centers, cfg)
        residuals.append(residual)
        # E == 0 is a fixed point: further passes cannot change anything
        if residual < cfg.residual_threshold or residual == 0:
            break

    labels = enforce_connectivity(labels, centers)
    used, labels = np.unique(labels, return_inverse=True)
    labels = labels.reshape(lab.height, lab.width)
    final_centers = compute_centers(lab, labels, len(used))
    return SuperpixelMap(labels, final_centers, len(residuals), residuals[-1], residuals)


def superpixels_to_grid(smap: SuperpixelMap, lab: LabImage, grid_w: int, grid_h: int) -> np.ndarray:
    """Grid vector of normalized superpixel luminance, row-major, length grid_w * grid_h.

    Each cell takes the mean l/100 of the superpixel whose center is nearest
    the cell midpoint (ties to the lowest superpixel index).
    """
    if smap.n_superpixels == 0:
        raise ValueError("empty superpixel map")
    if grid_w < 1 or grid_h < 1:
        raise ValueError("grid dimensions must be >= 1")
    h, w = smap.labels.shape
    flat = smap.labels.ravel()
    k = smap.n_superpixels
    counts = np.bincount(flat, minlength=k)
    lum = np.bincount(flat, weights=lab.data[..., 0].ravel(), minlength=k)
    mean_l = np.divide(lum, counts, out=smap.centers[:, L].copy(), where=counts > 0)

    mx = (np.arange(grid_w) + 0.5) * (w / grid_w) - 0.5
    my = (np.arange(grid_h) + 0.5) * (h / grid_h) - 0.5
    gx, gy = np.meshgrid(mx, my)
    d2 = (gx.ravel()[:, None] - smap.centers[None, :, X]) ** 2 + (gy.ravel()[:, None] - smap.centers[None, :, Y]) ** 2
    nearest = np.argmin(d2, axis=1)
    return np.clip(mean_l[nearest] / 100.0, 0.0, 1.0)


def write_label_map(path, smap: SuperpixelMap) -> None:
    h, w = smap.labels.shape
    with open(path, "w") as f:
        f.write(f"SLICLABELS v1\n{w} {h} {smap.n_superpixels}\n")
        for row in smap.labels:
            f.write(" ".join(map(str, row.tolist())) + "\n")


def read_label_map(path) -> np.ndarray:
    with open(path) as f:
        if f.readline().rstrip("\n") != "SLICLABELS v1":
            raise ValueError(f"{path}: not a SLICLABELS v1 file")
        w, h, k = map(int, f.readline().split())
        labels = np.array([list(map(int, f.readline().split())) for _ in range(h)], dtype=np.int64)
    if labels.shape != (h, w) or labels.min() < 0 or labels.max() >= k:
        raise ValueError(f"{path}: label data inconsistent with header")
    return labels
