"""
Output files: binary matrix dumps, CSV tables and JSON documents.

Matrix files (``.cbin``) hold a square complex matrix as a stream of
little-endian complex doubles in column-major order, 16 bytes per entry,
with no header. The dimension and provenance live in a JSON sidecar
``<name>.json``::

    {"dimension": 512, "seed": 1, "config_hash": "..."}

Every CSV starts with a ``# manifest <digest>`` line and every JSON
document carries a ``"manifest"`` key, so each file names the run that
produced it.
"""
import json
import math
import os
import struct

import numpy as np

from .ensemble import HermitianBlockMatrix


ENTRY = struct.Struct('<dd')


class MatrixFileWriter:
    def __init__(self, outfile):
        self._outfile = outfile

    def write_matrix(self, matrix):
        "Write every entry, column by column."
        data = np.asarray(matrix, dtype='<c16')
        self._outfile.write(data.tobytes(order='F'))


class MatrixFileReader:
    def __init__(self, infile, dimension):
        self._infile = infile
        self.dimension = dimension

    def read_bytes(self, count):
        data = self._infile.read(count)
        if len(data) != count:
            raise ValueError("matrix file ends after %d of %d bytes" % (len(data), count))
        return data

    def read_matrix(self):
        n = self.dimension
        data = np.frombuffer(self.read_bytes(n * n * ENTRY.size), dtype='<c16')
        return data.reshape((n, n), order='F').astype(np.complex128)


def _ensure_dir(filename):
    dirname = os.path.dirname(filename)
    if dirname:
        os.makedirs(dirname, exist_ok=True)


def sidecar_path(filename):
    return os.path.splitext(filename)[0] + '.json'


def write_matrix(filename, H, seed, config_hash, manifest=None):
    """Write a matrix and its sidecar; returns the two paths."""
    dense = H.dense() if isinstance(H, HermitianBlockMatrix) else np.asarray(H)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ValueError("only square matrices can be exported, got shape %r" % (dense.shape,))

    _ensure_dir(filename)
    with open(filename, 'wb') as out:
        MatrixFileWriter(out).write_matrix(dense)

    sidecar = {
        'dimension': int(dense.shape[0]),
        'seed': int(seed),
        'config_hash': config_hash,
    }
    write_json(sidecar_path(filename), sidecar, manifest)
    return filename, sidecar_path(filename)


def read_matrix(filename):
    "Read a matrix back using the dimension recorded in its sidecar."
    with open(sidecar_path(filename), encoding='utf-8') as source:
        sidecar = json.load(source)
    with open(filename, 'rb') as infile:
        reader = MatrixFileReader(infile, sidecar['dimension'])
        matrix = reader.read_matrix()
        if infile.read(1):
            raise ValueError("matrix file %s is longer than its sidecar says" % filename)
    return matrix, sidecar


##########################################################################
# Tables
##########################################################################

def format_value(value):
    "Shortest text that reads back to the same float."
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(value)


def write_csv(filename, header, rows, manifest=None):
    """Write a comma separated table.

    ``header`` is a sequence of column names; the first line names the
    manifest digest when one is given.
    """
    _ensure_dir(filename)
    with open(filename, 'w', encoding='utf-8', newline='\n') as out:
        if manifest:
            out.write('# manifest %s\n' % manifest)
        out.write(','.join(header) + '\n')
        for row in rows:
            out.write(','.join(format_value(v) for v in row) + '\n')
    return filename


def read_csv(filename):
    "Return (manifest, header, rows) of a table written by write_csv."
    manifest = None
    with open(filename, encoding='utf-8') as source:
        lines = source.read().splitlines()
    if lines and lines[0].startswith('# manifest '):
        manifest = lines.pop(0)[len('# manifest '):]
    header = lines[0].split(',')
    rows = [[float(v) for v in line.split(',')] for line in lines[1:]]
    return manifest, header, rows


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def write_json(filename, data, manifest=None):
    _ensure_dir(filename)
    document = _plain(data)
    if manifest:
        document['manifest'] = manifest
    with open(filename, 'w', encoding='utf-8', newline='\n') as out:
        json.dump(document, out, sort_keys=True, indent=2)
        out.write('\n')
    return filename
