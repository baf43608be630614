"""File formats for tag streams, fringe traces and reports.

Tag stream binary format: a 16-byte header (magic ``PTAG``, u16
little-endian version, 10 reserved zero bytes) followed by 9-byte records
of (channel: u8, timestamp: u64 little-endian picoseconds), time-ordered
with both channels interleaved.  Channel codes: 0 = signal, 1 = idler.

CSV alternative: header ``channel,timestamp_ps`` with channel names
spelled out.  Fringe traces: ``bin_index,bin_start_s,counts``.
"""

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .analysis import FringeTrace
from .tagsim import TimeTagStream

PTAG_MAGIC = b"PTAG"
PTAG_VERSION = 1
_HEADER = struct.Struct("<4sH10s")
_RECORD_DTYPE = np.dtype([("channel", "u1"), ("timestamp", "<u8")])
_CHANNEL_CODES = {"signal": 0, "idler": 1}
_CHANNEL_NAMES = {0: "signal", 1: "idler"}


def _merge_records(signal, idler):
    n = len(signal) + len(idler)
    records = np.empty(n, dtype=_RECORD_DTYPE)
    records["channel"][: len(signal)] = _CHANNEL_CODES["signal"]
    records["timestamp"][: len(signal)] = signal.timestamps_ps
    records["channel"][len(signal):] = _CHANNEL_CODES["idler"]
    records["timestamp"][len(signal):] = idler.timestamps_ps
    order = np.lexsort((records["channel"], records["timestamp"]))
    return records[order]


def _split_records(records, duration_ps, seed=None, scenario_id=""):
    streams = {}
    for name, code in _CHANNEL_CODES.items():
        ts = records["timestamp"][records["channel"] == code].astype(np.int64)
        streams[name] = TimeTagStream(
            channel=name,
            timestamps_ps=ts,
            duration_ps=duration_ps,
            seed=seed,
            scenario_id=scenario_id,
        )
    return streams["signal"], streams["idler"]


def write_tags(path, signal, idler):
    """Write both channels to one binary tag file."""
    records = _merge_records(signal, idler)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(PTAG_MAGIC, PTAG_VERSION, b"\x00" * 10))
        fh.write(records.tobytes())


def read_tags(path, duration_ps=None):
    """Read a binary tag file back into (signal, idler) streams.

    ``duration_ps`` defaults to the last timestamp in the file.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated tag file header")
    magic, version, _ = _HEADER.unpack_from(raw)
    if magic != PTAG_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != PTAG_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    body = raw[_HEADER.size:]
    if len(body) % _RECORD_DTYPE.itemsize:
        raise ValueError(f"{path}: truncated record data")
    records = np.frombuffer(body, dtype=_RECORD_DTYPE)
    if duration_ps is None:
        duration_ps = int(records["timestamp"].max()) if records.size else 0
    return _split_records(records, duration_ps)


def write_tags_csv(path, signal, idler):
    """Write both channels as CSV with columns channel,timestamp_ps."""
    records = _merge_records(signal, idler)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel", "timestamp_ps"])
        for channel, ts in records:
            writer.writerow([_CHANNEL_NAMES[int(channel)], int(ts)])


def read_tags_csv(path, duration_ps=None):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["channel", "timestamp_ps"]:
            raise ValueError(f"{path}: expected header channel,timestamp_ps")
        rows = [(r[0], int(r[1])) for r in reader]
    records = np.empty(len(rows), dtype=_RECORD_DTYPE)
    for k, (name, ts) in enumerate(rows):
        if name not in _CHANNEL_CODES:
            raise ValueError(f"{path}: unknown channel {name!r}")
        records[k] = (_CHANNEL_CODES[name], ts)
    if duration_ps is None:
        duration_ps = int(records["timestamp"].max()) if records.size else 0
    return _split_records(records, duration_ps)


def write_trace_csv(path, trace):
    """Write a fringe trace as ``bin_index,bin_start_s,counts``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_index", "bin_start_s", "counts"])
        for k, c in enumerate(trace.counts):
            writer.writerow([k, f"{k * trace.bin_duration:.6f}", int(c)])


def read_trace_csv(path, stage_velocity=0.0):
    """Read a fringe trace CSV; bin duration is inferred from the starts."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["bin_index", "bin_start_s", "counts"]:
            raise ValueError(f"{path}: expected header bin_index,bin_start_s,counts")
        try:
            rows = [(int(r[0]), float(r[1]), int(r[2])) for r in reader]
        except (ValueError, IndexError) as exc:
            raise ValueError(f"{path}: malformed trace row ({exc})") from exc
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two bins to infer bin duration")
    starts = [r[1] for r in rows]
    bin_duration = starts[1] - starts[0]
    counts = np.array([r[2] for r in rows], dtype=np.int64)
    return FringeTrace(
        counts=counts,
        bin_duration=bin_duration,
        stage_velocity=stage_velocity,
        metadata={"path": str(path)},
    )


def write_histogram_csv(path, samples, n_bins=60):
    """Histogram an array of visibility samples as bin_left,bin_right,count."""
    counts, edges = np.histogram(np.asarray(samples, dtype=float), bins=n_bins)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "count"])
        for k in range(counts.size):
            writer.writerow([f"{edges[k]:.8f}", f"{edges[k + 1]:.8f}", int(counts[k])])


def write_json(path, payload):
    """Write a report-style JSON file with deterministic key order."""
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
