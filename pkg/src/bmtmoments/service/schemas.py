"""Request and response models for the HTTP service and the CLI."""

from __future__ import annotations

from fractions import Fraction

from pydantic import BaseModel, Field, model_validator


class Rational(BaseModel):
    num: int
    den: int
    decimal: float

    @classmethod
    def from_fraction(cls, x: Fraction) -> "Rational":
        return cls(num=x.numerator, den=x.denominator, decimal=float(x))

    def text(self, decimal: bool = False) -> str:
        if decimal:
            return repr(self.decimal)
        return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"


class GraphInput(BaseModel):
    """Either a family spec like 'complete:5' (with N filled in when the
    spec uses the N placeholder) or a literal graph text."""

    family: str | None = None
    N: int | None = None
    text: str | None = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.family is None) == (self.text is None):
            raise ValueError("provide exactly one of 'family' or 'text'")
        return self


class KernelRequest(BaseModel):
    word: list[int]
    graph: GraphInput


class KernelResponse(BaseModel):
    word: list[int]
    ker: str
    ker_g: str
    equal: bool
    ncg_subgraph: bool
    ncg_edges: list[tuple[int, int]]


class MomentRequest(BaseModel):
    word: list[int]
    graph: GraphInput
    marginal: str = "bernoulli"
    lam: str | None = None


class MomentResponse(BaseModel):
    moment: Rational
    kernel: str
    marginal: str


class LawRequest(BaseModel):
    name: str
    upto: int = Field(default=10, ge=1, le=64)
    lam: str | None = None


class LawEntry(BaseModel):
    k: int
    value: Rational


class LawResponse(BaseModel):
    law: str
    moments: list[LawEntry]


class OperatorVerifyRequest(BaseModel):
    graph: GraphInput
    max_len: int = Field(default=6, ge=1, le=10)
    seed: int = 0


class OperatorVerifyResponse(BaseModel):
    cases: int
    ok: bool
    max_deviation: float
    tolerance: float
    violations: list[str]


class CltRequest(BaseModel):
    family: str
    N: list[int]
    moments: list[int]


class TableCell(BaseModel):
    N: int
    m: int
    exact: Rational
    leading: Rational
    reference: Rational | None = None
    gap_leading: Rational
    gap_reference: Rational | None = None


class CltSummary(BaseModel):
    m: int
    fitted_c: float
    monotone_decay: bool


class CltResponse(BaseModel):
    family: str
    rows: list[TableCell]
    summary: list[CltSummary]


class PoissonRequest(BaseModel):
    family: str
    lam: str = "1"
    N: list[int]
    moments: list[int]


class PoissonResponse(BaseModel):
    family: str
    lam: str
    rows: list[TableCell]


class GraphGenRequest(BaseModel):
    spec: str
    N: int | None = None


class GraphGenResponse(BaseModel):
    text: str


class SelftestCheck(BaseModel):
    name: str
    ok: bool
    detail: str


class SelftestResponse(BaseModel):
    ok: bool
    checks: list[SelftestCheck]


class HealthResponse(BaseModel):
    status: str
    version: str
