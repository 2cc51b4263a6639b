"""Binary model files.

Layout: the magic line ``SCENEDBM v1\\n`` followed by sections, each a
1-byte name length, the ASCII name, a little-endian uint64 payload length
and the payload. Integers are little-endian uint64, reals little-endian
float64, matrices row-major.

Sections: ``CONFIG`` (UTF-8 config text), ``DBM`` (sizes triple, w1, w2,
b, c1, c2), ``SOFTMAX`` (k, d, theta, lambda), ``RBM`` (p_v, p_h, w, b, c).
"""

from __future__ import annotations

import struct

import numpy as np

from scenedbm import config as config_mod
from scenedbm.dbm import DbmParams
from scenedbm.rbm import RbmParams
from scenedbm.softmax import SoftmaxParams

MAGIC = b"SCENEDBM v"
VERSION = b"1"
_F64 = np.dtype("<f8")


class ModelFormatError(ValueError):
    pass


def _ints(*values) -> bytes:
    return struct.pack(f"<{len(values)}Q", *values)


def _reals(*arrays) -> bytes:
    return b"".join(np.ascontiguousarray(a, dtype=_F64).tobytes() for a in arrays)


class _Reader:
    def __init__(self, buf: bytes, what: str):
        self.buf, self.pos, self.what = buf, 0, what

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise ModelFormatError(f"truncated {self.what}")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def ints(self, count: int):
        return struct.unpack(f"<{count}Q", self.take(8 * count))

    def reals(self, *shape) -> np.ndarray:
        n = int(np.prod(shape, dtype=np.int64))
        return np.frombuffer(self.take(8 * n), dtype=_F64).reshape(shape).astype(np.float64)

    def done(self):
        if self.pos != len(self.buf):
            raise ModelFormatError(f"trailing bytes in {self.what}")


def encode_dbm(p: DbmParams) -> bytes:
    return _ints(*p.sizes) + _reals(p.w1, p.w2, p.b, p.c1, p.c2)


def decode_dbm(payload: bytes) -> DbmParams:
    r = _Reader(payload, "DBM section")
    pv, ph1, ph2 = r.ints(3)
    params = DbmParams(r.reals(pv, ph1), r.reals(ph1, ph2), r.reals(pv), r.reals(ph1), r.reals(ph2))
    r.done()
    return params


def encode_softmax(p: SoftmaxParams) -> bytes:
    return _ints(p.n_classes, p.n_features) + _reals(p.theta, np.array([p.lam]))


def decode_softmax(payload: bytes) -> SoftmaxParams:
    r = _Reader(payload, "SOFTMAX section")
    k, d = r.ints(2)
    theta = r.reals(k, d + 1)
    lam = float(r.reals(1)[0])
    r.done()
    return SoftmaxParams(theta, lam)


def encode_rbm(p: RbmParams) -> bytes:
    return _ints(p.n_visible, p.n_hidden) + _reals(p.w, p.b, p.c)


def decode_rbm(payload: bytes) -> RbmParams:
    r = _Reader(payload, "RBM section")
    pv, ph = r.ints(2)
    params = RbmParams(r.reals(pv, ph), r.reals(pv), r.reals(ph))
    r.done()
    return params


def encode_sections(sections: dict[str, bytes]) -> bytes:
    out = [MAGIC + VERSION + b"\n"]
    for name, payload in sections.items():
        raw = name.encode("ascii")
        out.append(bytes([len(raw)]) + raw + _ints(len(payload)) + payload)
    return b"".join(out)


def decode_sections(buf: bytes) -> dict[str, bytes]:
    header = MAGIC + VERSION + b"\n"
    if not buf.startswith(MAGIC):
        raise ModelFormatError("not a SCENEDBM model file")
    if buf[:len(header)] != header:
        version = buf[len(MAGIC):len(MAGIC) + 1]
        raise ModelFormatError(f"unsupported version {version!r}")
    r = _Reader(buf[len(header):], "model file")
    sections = {}
    while r.pos < len(r.buf):
        name = r.take(r.take(1)[0]).decode("ascii", errors="replace")
        (length,) = r.ints(1)
        sections[name] = r.take(length)
    return sections


def save_model(path, dbm: DbmParams, softmax: SoftmaxParams | None, cfg) -> None:
    sections = {"CONFIG": config_mod.dumps(cfg).encode("utf-8"), "DBM": encode_dbm(dbm)}
    if softmax is not None:
        sections["SOFTMAX"] = encode_softmax(softmax)
    with open(path, "wb") as f:
        f.write(encode_sections(sections))


def load_model(path):
    """Returns ``(dbm, softmax, cfg)``; softmax is None for a pretrained-only file."""
    with open(path, "rb") as f:
        sections = decode_sections(f.read())
    for required in ("CONFIG", "DBM"):
        if required not in sections:
            raise ModelFormatError(f"missing {required} section")
    cfg = config_mod.loads(sections["CONFIG"].decode("utf-8"), f"{path}:CONFIG")
    dbm = decode_dbm(sections["DBM"])
    softmax = decode_softmax(sections["SOFTMAX"]) if "SOFTMAX" in sections else None
    if dbm.sizes[0] != cfg.n_visible or dbm.sizes[1:] != cfg.hidden:
        raise ModelFormatError(f"DBM sizes {dbm.sizes} disagree with the stored config")
    return dbm, softmax, cfg


def save_rbm(path, params: RbmParams) -> None:
    with open(path, "wb") as f:
        f.write(encode_sections({"RBM": encode_rbm(params)}))


def load_rbm(path) -> RbmParams:
    with open(path, "rb") as f:
        sections = decode_sections(f.read())
    if "RBM" not in sections:
        raise ModelFormatError("missing RBM section")
    return decode_rbm(sections["RBM"])
