"""Deterministic text serialization: JSON documents and CSV tables with decimal strings.

Every number is written as a decimal string. mpmath values keep the working
precision; float64 values are written with repr, which round-trips exactly.
Documents are dumped with a fixed layout so that load followed by dump
reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os

from mpmath import mpc, mpf

from . import __version__
from .model import mp_to_str

SCHEMA_VERSION = 1
RATES_CSV_COLUMNS = ("N", "log_error", "kind", "z_re", "z_im")


def num(x, digits=None):
    """Decimal string of an mpf (at ``digits``), float or int."""
    if isinstance(x, mpf):
        return mp_to_str(x, digits or 30)
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def complex_pair(z, digits=None):
    if isinstance(z, mpc):
        return [num(z.real, digits), num(z.imag, digits)]
    z = complex(z)
    return [num(z.real), num(z.imag)]


def config_hash(config):
    """SHA-256 of the canonical JSON of the effective configuration (output_dir excluded)."""
    payload = {k: v for k, v in config.items() if k != "output_dir"}
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(text.encode("ascii")).hexdigest()


def stamp(doc_type, config):
    """Header fields carried by every output document."""
    return {
        "schema_version": SCHEMA_VERSION,
        "document": doc_type,
        "tool_version": __version__,
        "config_hash": config_hash(config),
    }


def dumps(doc):
    return json.dumps(doc, indent=1, ensure_ascii=True) + "\n"


def write_json(path, doc):
    text = dumps(doc)
    _atomic_write(path, text)
    return path


def load_json(path):
    with open(path, encoding="ascii") as fh:
        return json.load(fh)


def csv_text(rows, columns=RATES_CSV_COLUMNS):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_csv(path, rows, columns=RATES_CSV_COLUMNS):
    _atomic_write(path, csv_text(rows, columns))
    return path


def load_csv(path):
    with open(path, encoding="ascii", newline="") as fh:
        rows = list(csv.reader(fh))
    return tuple(rows[0]), [tuple(r) for r in rows[1:]]


def _atomic_write(path, text):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="ascii", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
