"""Shared error types, mapped to exit codes and HTTP statuses at the edges."""


class InputError(ValueError):
    """Invalid input: bad word, malformed graph, precondition violation.

    CLI exit code 1, HTTP 400.
    """


class CapExceeded(RuntimeError):
    """A size or budget cap was exceeded; the request is refused, not attempted.

    CLI exit code 2, HTTP 413.
    """
