"""Reference external evaluator for the line-delimited trial protocol.

A stand-in for a real training loop: a cheap closed-form objective that
reports one metric per planned checkpoint over stdin/stdout. Intended as
a template — replace the objective with actual training code and keep
the message handling.
"""

from .evaluator import ToyObjective, serve

__all__ = ["ToyObjective", "serve"]
