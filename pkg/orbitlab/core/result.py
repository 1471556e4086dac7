"""
Classes for storing experiment reports.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from orbitlab.__version__ import __version__


@dataclass
class Provenance:
    """Everything needed to rerun an experiment: command, version and bounds."""
    command: str
    precision: int
    seed: int
    params: Dict[str, Any] = field(default_factory=dict)
    map: Optional[Dict[str, Any]] = None
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "version": self.version,
            "precision": self.precision,
            "seed": self.seed,
            "params": self.params,
        }
        if self.map is not None:
            data["map"] = self.map
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Provenance":
        return cls(
            command=data.get("command", ""),
            precision=int(data.get("precision", 0)),
            seed=int(data.get("seed", 0)),
            params=dict(data.get("params", {})),
            map=data.get("map"),
            version=data.get("version", __version__),
        )


@dataclass
class ExperimentReport:
    """Outcome of one experiment, either a result or a machine-readable error."""
    command: str
    result: Optional[Dict[str, Any]] = None
    error: Optional[Dict[str, str]] = None
    provenance: Optional[Provenance] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def exit_code(self) -> int:
        """0 on success, 64 for an unknown command, 65 for a malformed manifest, else 2."""
        if self.ok:
            return 0
        kind = self.error.get("kind")
        if kind == "unknown_command":
            return 64
        if kind == "malformed_spec":
            return 65
        return 2

    def to_dict(self) -> Dict[str, Any]:
        """Convert object to dictionary for export."""
        data: Dict[str, Any] = {"command": self.command}
        if self.ok:
            data["result"] = self.result
        else:
            data["error"] = self.error
        if self.provenance is not None:
            data["provenance"] = self.provenance.to_dict()
        return data

    @classmethod
    def failure(cls, command: str, exc: Exception,
                provenance: Optional[Provenance] = None) -> "ExperimentReport":
        """Report for a domain error; the kind comes from the exception class."""
        if hasattr(exc, "to_dict"):
            error = exc.to_dict()
        else:
            error = {"kind": "precondition", "message": str(exc)}
        return cls(command, None, error, provenance)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentReport":
        prov = data.get("provenance")
        return cls(
            command=data.get("command", ""),
            result=data.get("result"),
            error=data.get("error"),
            provenance=Provenance.from_dict(prov) if prov else None,
        )
