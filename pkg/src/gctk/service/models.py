"""Request and response models for the verification service."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class VerifyRequest(BaseModel):
    n: int = Field(1, ge=1, le=3, description="quaternionic dimension of the flat model")
    seed: int = 0
    samples: int = Field(50, ge=1, le=500)
    tol: float = Field(1e-9, ge=0.0, description="tolerance for the float cross-check lane only")
    mutate: Optional[Literal["nonclosed-omega"]] = None


class CheckRecord(BaseModel):
    check_id: str
    n: int
    parameters: dict
    status: Literal["pass", "fail", "skip"]
    residual: Union[str, float, None] = None
    elapsed_ms: float


class VerificationReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(alias="schema")
    suite: str
    toolkit_version: str
    seed: int
    checks: list[CheckRecord]

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)


class TypemapRequest(BaseModel):
    n: int = Field(1, ge=1, le=3)
    grid: int = Field(3, ge=2, le=25)
    fiber: bool = Field(
        False,
        description="report fiber types; the default shifts by the two sphere factors",
    )


class SpinorRequest(BaseModel):
    n: int = Field(1, ge=1, le=3)
    alpha: Optional[str] = Field(None, description="rational complex literal p/q+r/si")
    beta: Optional[str] = None
    format: Literal["text"] = "text"


class SpinorResponse(BaseModel):
    n: int
    symbolic: bool
    text: str


class FmapRequest(BaseModel):
    eta: str
    zeta: str


class FmapResponse(BaseModel):
    alpha: str
    beta: str
