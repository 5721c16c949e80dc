"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

ExportFormat = Literal["pgjson", "linktuple", "gml", "graphml", "ntriples", "dot", "html"]
ImportFormat = Literal["pgjson", "linktuple"]


class HealthOut(BaseModel):
    status: str
    store_path: Optional[str]
    exclusive: bool
    triples: int
    individuals: int


class NodeCreate(BaseModel):
    name: Optional[str] = None
    comments: list[str] = Field(default_factory=list)
    creator: Optional[str] = None


class EdgeCreate(BaseModel):
    cause: str
    effect: str
    name: Optional[str] = None
    confidence: Optional[float] = None
    time_lag_s: Optional[float] = None
    comments: list[str] = Field(default_factory=list)
    creator: Optional[str] = None
    force_create: bool = False


class IndividualCreate(BaseModel):
    class_name: str
    name: Optional[str] = None
    props: dict = Field(default_factory=dict)


class NameOut(BaseModel):
    name: str


class RemovedOut(BaseModel):
    removed: bool


class CountOut(BaseModel):
    removed: int


class IndividualOut(BaseModel):
    name: str
    types: list[str]


class IndividualsOut(BaseModel):
    individuals: list[IndividualOut]


class ClassesOut(BaseModel):
    classes: list[str]


class EdgeRecordOut(BaseModel):
    name: str
    cause: str
    effect: str
    confidence: Optional[float] = None
    time_lag_s: Optional[float] = None
    creator: Optional[str] = None
    comments: list[str] = Field(default_factory=list)


class QueryIn(BaseModel):
    text: str


class QueryOut(BaseModel):
    variables: list[str]
    rows: list[dict[str, str]]


class ValidationOut(BaseModel):
    ok: bool
    violations: list[str]
    cycles: list[list[str]]


class ExportIn(BaseModel):
    format: ExportFormat
    step_s: float = 1.0
    include_metadata: bool = True


class ExportOut(BaseModel):
    format: ExportFormat
    content: str
    warnings: list[str] = Field(default_factory=list)


class OntologyImportIn(BaseModel):
    content: str
    filename: str = "imported.ttl"


class OntologyImportOut(BaseModel):
    classes_added: int
    properties_added: int
    triples_added: int
    message: str


class LoadIn(BaseModel):
    format: ImportFormat
    content: str
    store_path: str
    overwrite: bool = False


class LoadOut(BaseModel):
    store_path: str
    individuals: int
