"""Resource limits shared by the solvers: variable count and wall-clock budget."""

from __future__ import annotations

import contextlib
import contextvars
import time

MAX_VARS = 20

_deadline: contextvars.ContextVar[float | None] = contextvars.ContextVar("fpabd_deadline", default=None)
_max_vars: contextvars.ContextVar[int] = contextvars.ContextVar("fpabd_max_vars", default=MAX_VARS)


class ResourceLimit(RuntimeError):
    """A size or time budget was exceeded."""


@contextlib.contextmanager
def budget(ms: float | None = None, max_vars: int | None = None):
    """Limit the enclosed computation to ``ms`` milliseconds and ``max_vars`` variables."""
    tokens = []
    if ms is not None:
        deadline = time.monotonic() + ms / 1000.0
        current = _deadline.get()
        if current is not None:
            deadline = min(deadline, current)
        tokens.append((_deadline, _deadline.set(deadline)))
    if max_vars is not None:
        tokens.append((_max_vars, _max_vars.set(max_vars)))
    try:
        yield
    finally:
        for var, tok in reversed(tokens):
            var.reset(tok)


def check_budget() -> None:
    deadline = _deadline.get()
    if deadline is not None and time.monotonic() > deadline:
        raise ResourceLimit("time budget exceeded")


def max_vars() -> int:
    return _max_vars.get()


def check_vars(n: int) -> None:
    limit = _max_vars.get()
    if n > limit:
        raise ResourceLimit(f"{n} variables exceed the limit of {limit}")
