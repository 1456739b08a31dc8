import atexit
import contextlib
import json
import os
import shutil
import sys
import tempfile
import traceback
from io import StringIO
from unittest import TestCase

import numpy as np

from dynrmt.config import build_config
from dynrmt.evalfn import FourierSpec

# get path to `tests` directory
TESTS_DIR = os.path.dirname(__file__)

# Acceptance checks run at desk scale unless DYNRMT_FULL=1 is exported
# into the test environment.
FULL = os.environ.get('DYNRMT_FULL', '0').lower() in ('1', 'true')


def scale(desk, full):
    "Pick the desk-scale or the full-scale value of an acceptance parameter."
    return full if FULL else desk

# Temporary directory containing all files generated by this test process
_output_dir = ''


def output_dir():
    "A scratch directory shared by the test process, removed at exit."
    global _output_dir

    if _output_dir == '':
        def remove_output_dir():
            if _output_dir != '':
                shutil.rmtree(_output_dir, ignore_errors=True)

        atexit.register(remove_output_dir)
        _output_dir = tempfile.mkdtemp(dir=TESTS_DIR)
    return tempfile.mkdtemp(dir=_output_dir)


@contextlib.contextmanager
def capture_output(redirect_stderr=True):
    oldout, olderr = sys.stdout, sys.stderr
    try:
        out = StringIO()
        sys.stdout = out
        if redirect_stderr:
            sys.stderr = out
        else:
            sys.stderr = StringIO()
        yield out
    except:
        if redirect_stderr:
            traceback.print_exc()
        else:
            raise
    finally:
        sys.stdout, sys.stderr = oldout, olderr


def run_config(coeffs=None, **fields):
    """A RunConfig for tests; unset fields take the library defaults.

    Tests never read DYNRMT_SEED, so their seeds are the ones they name.
    """
    data = {}
    if coeffs is not None:
        data['coeffs'] = coeffs
    data.update(fields)
    return build_config(data, environ={})


EXPONENTIAL = [[1, 1.0, 0.0]]
COSINE = [[-1, 0.5, 0.0], [1, 0.5, 0.0]]


def exponential():
    return FourierSpec.exponential()


def read_json(filename):
    with open(filename, encoding='utf-8') as source:
        return json.load(source)


def read_bytes(filename):
    with open(filename, 'rb') as source:
        return source.read()


class LabTestCase(TestCase):
    "TestCase with numpy-aware assertions."

    def assertAllClose(self, actual, expected, rtol=1e-12, atol=0.0, msg=None):
        actual = np.asarray(actual)
        expected = np.asarray(expected)
        if actual.shape != expected.shape and expected.ndim != 0:
            self.fail(msg or "shape %r != %r" % (actual.shape, expected.shape))
        if not np.allclose(actual, expected, rtol=rtol, atol=atol):
            worst = float(np.max(np.abs(actual - expected)))
            self.fail(msg or "arrays differ by up to %.3g (rtol=%g, atol=%g)" % (worst, rtol, atol))

    def assertArrayEqual(self, actual, expected, msg=None):
        if not np.array_equal(np.asarray(actual), np.asarray(expected)):
            self.fail(msg or "arrays are not equal")

    def assertHermitian(self, H, atol=0.0):
        H = np.asarray(H)
        self.assertAllClose(H, H.conj().T, rtol=0.0, atol=atol)
