"""Named residual statistics for verified identities."""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["IdentityRecord", "InvariantReport", "CONVENTIONS"]

# Recorded in every JSON report so downstream comparisons are unambiguous.
CONVENTIONS = {
    "epsilon": "eps(1,2,...,d) = +1",
    "cross_sign_anchor": "cross_n(e1, e2, e3) = -e4 (d = 4)",
    "hodge_anchor": "star(e1 ^ e2) = e3 ^ e4",
    "sqrt_branch": "positive root in all reconstruction radicals",
}


@dataclass
class IdentityRecord:
    name: str
    max_residual: float
    mean_residual: float
    argmax_site: tuple
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_dict(self):
        return {
            "name": self.name,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "argmax_site": list(self.argmax_site),
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    @classmethod
    def from_field(cls, name, residual, tolerance):
        """Reduce a residual array over sites (deterministic order)."""
        r = np.abs(np.asarray(residual, dtype=float))
        flat = r.reshape(-1)
        k = int(np.argmax(flat))
        site = np.unravel_index(k, r.shape) if r.ndim else ()
        return cls(
            name=name,
            max_residual=float(flat[k]) if flat.size else 0.0,
            mean_residual=float(flat.mean()) if flat.size else 0.0,
            argmax_site=tuple(int(s) for s in site),
            tolerance=float(tolerance),
        )


@dataclass
class InvariantReport:
    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, name, residual, tolerance):
        rec = IdentityRecord.from_field(name, residual, tolerance)
        self.records.append(rec)
        return rec

    def __getitem__(self, name) -> IdentityRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(rec.passed for rec in self.records)

    def max_residual(self, name=None) -> float:
        recs = self.records if name is None else [self[name]]
        return max((r.max_residual for r in recs), default=0.0)

    def to_dict(self, include_meta=True):
        out = {
            "schema_version": 1,
            "conventions": dict(CONVENTIONS),
            "pass": self.passed,
            "identities": [rec.to_dict() for rec in self.records],
        }
        if include_meta and self.metadata:
            out["metadata"] = dict(self.metadata)
        return out

    def to_json(self, include_meta=True, indent=2):
        return json.dumps(self.to_dict(include_meta=include_meta), indent=indent, sort_keys=True)
