"""Binary dataset files.

Layout (all little-endian)::

    header
      magic      8 bytes   b"SLADSET\\0"
      version    uint32    FORMAT_VERSION
      M          uint32    virtual ULA size
      N          uint32    physical sensor count
      T          uint32    snapshots per record
      count      uint32    number of records
      S          N x uint32  1-based sensor indices
    record (repeated ``count`` times)
      k          uint32
      snr_db     float64
      rho        float64
      theta      k x float64   ascending, radians
      scm        2*N*N x float64  row-major, interleaved (re, im)
      target     2*M*k x float64  row-major M x k basis, interleaved (re, im)

Readers reject files whose magic or version differ.
"""

import struct

import numpy as np

from .array_sim import ArrayGeometry, DatasetRecord
from .errors import FileFormatError

MAGIC = b"SLADSET\0"
FORMAT_VERSION = 1
_HEAD = struct.Struct("<8s5I")
_REC = struct.Struct("<Idd")


def _interleave(z):
    z = np.ascontiguousarray(z, dtype=np.complex128)
    return z.view(np.float64).astype("<f8").tobytes()


def _deinterleave(buf, shape):
    return np.frombuffer(buf, dtype="<f8").astype(np.float64).view(np.complex128).reshape(shape)


def write_dataset(path, geom, records, T):
    """Write ``records`` produced for ``geom`` with ``T`` snapshots each."""
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, FORMAT_VERSION, geom.M, geom.N, int(T), len(records)))
        fh.write(np.asarray(geom.S, dtype="<u4").tobytes())
        for r in records:
            fh.write(_REC.pack(int(r.k), float(r.snr_db), float(r.rho)))
            fh.write(np.asarray(r.theta, dtype="<f8").tobytes())
            fh.write(_interleave(r.scm))
            fh.write(_interleave(r.target))


def read_dataset(path):
    """Read a dataset file.

    Returns:
        (geometry, T, list of DatasetRecord)
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEAD.size:
        raise FileFormatError(f"{path}: truncated header")
    magic, version, M, N, T, count = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise FileFormatError(f"{path}: not a dataset file")
    if version != FORMAT_VERSION:
        raise FileFormatError(f"{path}: unsupported format version {version}")
    off = _HEAD.size
    if len(data) < off + 4 * N:
        raise FileFormatError(f"{path}: truncated sensor list")
    S = np.frombuffer(data, dtype="<u4", count=N, offset=off).tolist()
    off += 4 * N
    try:
        geom = ArrayGeometry(M, tuple(S))
    except ValueError as exc:
        raise FileFormatError(f"{path}: invalid geometry ({exc})") from exc
    records = []
    try:
        for _ in range(count):
            k, snr, rho = _REC.unpack_from(data, off)
            off += _REC.size
            theta = np.frombuffer(data, dtype="<f8", count=k, offset=off).astype(np.float64)
            off += 8 * k
            scm = _deinterleave(data[off : off + 16 * N * N], (N, N))
            off += 16 * N * N
            target = _deinterleave(data[off : off + 16 * M * k], (M, k))
            off += 16 * M * k
            records.append(DatasetRecord(scm=scm, theta=theta, k=k, target=target, snr_db=snr, rho=rho))
    except (struct.error, ValueError) as exc:
        raise FileFormatError(f"{path}: truncated or corrupt record data") from exc
    if off != len(data):
        raise FileFormatError(f"{path}: {len(data) - off} trailing bytes")
    return geom, T, records
