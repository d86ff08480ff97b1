"""Minimal estimator plumbing: constructor-param introspection.

Mirrors the get_params/set_params contract used by sklearn estimators
without importing sklearn. Subclasses must accept all hyperparameters as
keyword arguments in __init__ and store them under the same attribute
names.
"""

import inspect

from .errors import NotFittedError


class ParamsMixin:
    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters: {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def _check_fitted(self, *attrs):
        for attr in attrs:
            if getattr(self, attr, None) is None:
                raise NotFittedError(
                    f"{type(self).__name__} is not fitted; call fit() or load a model first"
                )
