from contextlib import contextmanager, redirect_stderr, redirect_stdout
from difflib import unified_diff as _unified_diff
from io import StringIO
from os import chdir as setcwd, environ, getcwd
from typing import List, Tuple
from unittest import skipIf
from unittest.mock import patch

from bayes_coherence.main import main


def skip_slow_tests():
    return bool(environ.get('SLOW_TESTS', False))


slow_test = skipIf(skip_slow_tests(), 'slow test')


@contextmanager
def chdir(path):
    old_cwd = getcwd()
    setcwd(str(path))
    try:
        yield
    finally:
        setcwd(old_cwd)


def run_main(args: List[str]) -> Tuple[int, str, str]:
    """Runs the CLI in-process; returns (status, stdout, stderr)."""
    stdout, stderr = StringIO(), StringIO()
    with redirect_stdout(stdout), redirect_stderr(stderr), \
            patch.dict(environ):
        environ.pop('BAYES_COHERENCE_FORMAT', None)
        try:
            status = main(args)
        except SystemExit as e:
            status = e.code if isinstance(e.code, int) else 1

    return status, stdout.getvalue(), stderr.getvalue()


@contextmanager
def assertion_context(context):
    """Prefixes every AssertionError raised within the context."""
    try:
        yield
    except AssertionError as e:
        e.args = ("{}{}".format(context, e.args[0]),)
        raise


def unified_diff(a, b, fromfile='', tofile=''):  # pylint: disable=C0103
    diff = _unified_diff(a.splitlines(keepends=True),
                         b.splitlines(keepends=True),
                         fromfile=fromfile, tofile=tofile)
    return ''.join(diff)
