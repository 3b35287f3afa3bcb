from __future__ import annotations


class CheckError(Exception):
    """A static rejection: every kinding or typing failure is one of these."""

    reasons: frozenset[str] = frozenset()

    def __init__(self, reason: str, detail: str, *, span=None, expected=None, found=None):
        if reason not in self.reasons:
            raise ValueError(f"unknown {type(self).__name__} reason {reason!r}")
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail
        self.span = span
        self.expected = expected
        self.found = found


class KindError(CheckError):
    reasons = frozenset({
        "not_star", "head_not_pi", "unbound_tvar", "lambda_needs_pi",
        "strat_kind_shape", "sort_mismatch", "kind_mismatch", "duplicate_binder",
    })


class TypingError(CheckError):
    reasons = frozenset({
        "mismatch", "cannot_infer", "not_function", "not_product", "not_sum",
        "not_sigma", "not_equality", "not_mu", "not_nu", "not_strat",
        "unifier_mismatch", "expected_clash_but_unifiable", "index_error",
        "scope_error", "rec_shape", "spine_shape",
    })


class FuelExhausted(Exception):
    """The evaluation step budget ran out."""


class EvalError(Exception):
    """Evaluation got stuck; unreachable from well-typed closed programs."""
