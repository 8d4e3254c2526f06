"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` so the CLI can emit
``{code, message, context}`` objects without string matching.
"""


class BTError(Exception):
    code = "DOMAIN_ERROR"

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_json(self):
        return {"code": self.code, "message": self.message,
                "context": {k: _plain(v) for k, v in self.context.items()}}


def _plain(v):
    """JSON-safe copy of a context value; anything exotic becomes its string form."""
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return str(v)


class DomainError(BTError, ValueError):
    code = "DOMAIN_ERROR"


class MalformedRationalError(BTError, ValueError):
    code = "BAD_RATIONAL"


class ZeroDenominatorError(MalformedRationalError):
    code = "ZERO_DENOMINATOR"


class DimensionError(BTError, ValueError):
    code = "DIM_MISMATCH"


class RankError(BTError, ValueError):
    code = "SINGULAR"


class NotUnimodularError(BTError, ValueError):
    code = "NOT_UNIMODULAR"


class WindowOverflowError(BTError, ValueError):
    code = "WINDOW_OVERFLOW"


class IndexSetError(BTError, ValueError):
    code = "BAD_INDEX"


class RepresentationError(BTError, ValueError):
    code = "BAD_REPRESENTATION"


class DescriptorError(BTError, ValueError):
    code = "BAD_DESCRIPTOR"


class DescriptorMismatchError(BTError, ValueError):
    code = "DESC_MISMATCH"


class ResolutionError(BTError, ValueError):
    code = "UNRESOLVED_END"


class UnsupportedEndError(BTError, ValueError):
    code = "UNSUPPORTED_END"


class UnknownCatalogEntry(BTError, KeyError):
    code = "UNKNOWN_CATALOG_ID"
