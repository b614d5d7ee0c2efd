from datetime import date, datetime, timezone
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class RawTweet(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    timestamp: datetime
    text: str

    @field_validator("timestamp")
    @classmethod
    def _as_utc(cls, value: datetime) -> datetime:
        # naive timestamps are read as GMT+0
        if value.tzinfo is None:
            return value.replace(tzinfo=timezone.utc)
        return value.astimezone(timezone.utc)

    @field_validator("text")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("tweet text is empty")
        return value

    @property
    def day(self) -> date:
        return self.timestamp.date()


class DailyDocuments(BaseModel):
    date: date
    documents: List[List[str]]

    @property
    def token_count(self) -> int:
        return sum(len(doc) for doc in self.documents)


class RecordError(BaseModel):
    file: str
    line: int
    reason: str


class IngestReport(BaseModel):
    read: int = 0
    filtered_in: int = 0
    dropped_url: int = 0
    dropped_no_phrase: int = 0
    unparseable: int = 0
    over_140: int = 0
    errors: List[RecordError] = Field(default_factory=list)

    def merge(self, other: "IngestReport", max_errors: Optional[int] = None) -> "IngestReport":
        errors = self.errors + other.errors
        if max_errors is not None:
            errors = errors[:max_errors]
        return IngestReport(
            read=self.read + other.read,
            filtered_in=self.filtered_in + other.filtered_in,
            dropped_url=self.dropped_url + other.dropped_url,
            dropped_no_phrase=self.dropped_no_phrase + other.dropped_no_phrase,
            unparseable=self.unparseable + other.unparseable,
            over_140=self.over_140 + other.over_140,
            errors=errors,
        )

    def counts(self) -> dict:
        return self.model_dump(exclude={"errors"})
