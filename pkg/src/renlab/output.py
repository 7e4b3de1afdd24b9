"""CSV tables, plot scripts and checksum manifests with fixed formatting."""

import csv
import hashlib
import json
import os

import numpy as np

DIGITS = 12


def fmt(v, digits=DIGITS):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if v == 0:
        return "0"  # drop the sign of negative zero
    return "%.*g" % (digits, v)


def write_rows(path, header, rows, digits=DIGITS, meta=None):
    """Write a CSV; `meta` goes into a leading '# {json}' comment line."""
    with open(path, "w", newline="") as fh:
        if meta is not None:
            fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v, digits) for v in row])
    return path


def read_rows(path):
    meta = None
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("# "):
            meta = json.loads(first[2:])
        else:
            fh.seek(0)
        r = csv.reader(fh)
        next(r)
        rows = [row for row in r]
    return meta, rows


def write_plot_script(path, csv_name, xcol, ycols, title, xlabel, ylabel):
    """A gnuplot command file reading the CSV by relative path."""
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set title '%s'" % title,
        "set xlabel '%s'" % xlabel,
        "set ylabel '%s'" % ylabel,
        "set terminal pngcairo size 800,600",
        "set output '%s.png'" % os.path.splitext(os.path.basename(path))[0],
    ]
    plots = ["'%s' using %d:%d with linespoints" % (csv_name, xcol, c) for c in ycols]
    lines.append("plot " + ", \\\n     ".join(plots))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, name="MANIFEST.sha256"):
    entries = []
    for root, _, files in os.walk(out_dir):
        for f in files:
            if f == name:
                continue
            p = os.path.join(root, f)
            entries.append((os.path.relpath(p, out_dir), sha256(p)))
    entries.sort()
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        for rel, digest in entries:
            fh.write("%s  %s\n" % (digest, rel))
    return path
