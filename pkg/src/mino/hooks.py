"""Injectable failure hook.

Wellfoundedness always holds in the symbolic model, so the "pre-good but
not good" branch of the error taxonomy is unreachable by construction.
The harness exercises it by declaring designated ultrapowers illfounded
through this hook.
"""

from contextlib import contextmanager

_hook = None


def illfounded(model, degree, host):
    return _hook is not None and _hook(model, degree, host)


@contextmanager
def declare_illfounded(predicate):
    """Treat ultrapowers matched by predicate(model, degree, host) as illfounded."""
    global _hook
    previous = _hook
    _hook = predicate
    try:
        yield
    finally:
        _hook = previous
