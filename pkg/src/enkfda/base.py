"""Estimator plumbing: scikit-learn style parameter introspection."""
import inspect


class ParamsMixin:
    """get_params/set_params keyed on the constructor signature.

    Constructor arguments are stored verbatim under attributes of the
    same name, so instances compose with tooling built around the
    scikit-learn estimator convention (cloning, grid instantiation).
    """

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep=True):
        out = {}
        for name in self._param_names():
            value = getattr(self, name)
            if deep and hasattr(value, "get_params") and not isinstance(value, type):
                for sub, subval in value.get_params(deep=True).items():
                    out[f"{name}__{sub}"] = subval
            out[name] = value
        return out

    def set_params(self, **params):
        valid = set(self._param_names())
        nested = {}
        for key, value in params.items():
            if "__" in key:
                head, _, tail = key.partition("__")
                nested.setdefault(head, {})[tail] = value
                continue
            if key not in valid:
                raise ValueError(
                    f"invalid parameter {key!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, key, value)
        for head, sub in nested.items():
            if head not in valid:
                raise ValueError(f"invalid parameter {head!r} for {type(self).__name__}")
            getattr(self, head).set_params(**sub)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={getattr(self, k)!r}" for k in self._param_names())
        return f"{type(self).__name__}({args})"
