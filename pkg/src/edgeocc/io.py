"""PFM disparity files and 8-bit mask / colour rasters."""

from __future__ import annotations

import io
import re
from pathlib import Path

import numpy as np
from PIL import Image

from .core import DisparityMap, OcclusionMask
from .evaluation import ConfusionImage


class FormatError(ValueError):
    pass


_PFM_HEADER = re.compile(rb"\A(P[fF])\s+(\d+)\s+(\d+)\s+(\S+)\s")


def read_pfm(data: bytes, sanitize: bool = False) -> DisparityMap:
    """Decode a single-channel PFM; rows come back top-to-bottom."""
    m = _PFM_HEADER.match(data[:256])
    if m is None:
        if data[:2] in (b"PF", b"Pf"):
            raise FormatError("malformed PFM header")
        raise FormatError(f"bad magic {data[:2]!r}, expected b'Pf'")
    magic, w, h, scale = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
    if magic == b"PF":
        raise FormatError("expected single-channel PFM ('Pf'), got colour 'PF'")
    try:
        scale = float(scale)
    except ValueError:
        raise FormatError(f"bad PFM scale {scale!r}") from None
    if scale == 0 or w == 0 or h == 0:
        raise FormatError("PFM scale and dimensions must be non-zero")
    dtype = "<f4" if scale < 0 else ">f4"
    payload = data[m.end():]
    need = w * h * 4
    if len(payload) < need:
        raise FormatError(f"truncated PFM payload: {len(payload)} of {need} bytes")
    v = np.frombuffer(payload[:need], dtype=dtype).reshape(h, w)
    return DisparityMap.from_array(np.flipud(v).astype(np.float32), sanitize=sanitize)


def write_pfm(d) -> bytes:
    v = d.values if isinstance(d, DisparityMap) else np.asarray(d)
    h, w = v.shape
    body = np.flipud(v).astype("<f4").tobytes()
    return f"Pf\n{w} {h}\n-1.0\n".encode("ascii") + body


def load_pfm(path, sanitize: bool = False) -> DisparityMap:
    return read_pfm(Path(path).read_bytes(), sanitize=sanitize)


def save_pfm(path, d) -> None:
    Path(path).write_bytes(write_pfm(d))


def write_mask(m: OcclusionMask, fmt: str = "PPM") -> bytes:
    """Encode as 0/255 8-bit grayscale (``PPM`` writes binary PGM, or ``PNG``)."""
    bits = m.bits if isinstance(m, OcclusionMask) else np.asarray(m, dtype=bool)
    buf = io.BytesIO()
    Image.fromarray(np.where(bits, 255, 0).astype(np.uint8)).save(buf, format=fmt)
    return buf.getvalue()


def read_mask(data: bytes, threshold: int | None = None) -> OcclusionMask:
    """Decode a grayscale raster; values must be 0/255 unless ``threshold`` is given."""
    with Image.open(io.BytesIO(data)) as im:
        if im.mode not in ("L", "1", "P"):
            raise FormatError(f"expected a single-channel 8-bit raster, got mode {im.mode}")
        a = np.asarray(im.convert("L"))
    if threshold is not None:
        return OcclusionMask(a > threshold)
    odd = np.setdiff1d(np.unique(a), [0, 255])
    if odd.size:
        raise FormatError(f"non-binary mask values {odd[:5].tolist()}; pass a threshold")
    return OcclusionMask(a == 255)


def _fmt_for(path) -> str:
    return "PNG" if Path(path).suffix.lower() == ".png" else "PPM"


def save_mask(path, m: OcclusionMask) -> None:
    Path(path).write_bytes(write_mask(m, _fmt_for(path)))


def load_mask(path, threshold: int | None = None) -> OcclusionMask:
    return read_mask(Path(path).read_bytes(), threshold)


def save_confusion(path, img: ConfusionImage) -> None:
    Image.fromarray(img.to_rgb()).save(path, format=_fmt_for(path))
