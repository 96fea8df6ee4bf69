from dataclasses import dataclass, field

OBSTRUCTION_MARGIN = 1e-8

NO_OBSTRUCTION = "no-obstruction-found"
OBSTRUCTION = "obstruction"


@dataclass(frozen=True)
class ObstructionRecord:
    identifier: str
    value: float
    bound: float
    margin: float = OBSTRUCTION_MARGIN

    @property
    def classification(self):
        return OBSTRUCTION if abs(self.value) > self.bound + self.margin else NO_OBSTRUCTION

    def to_row(self):
        return [self.identifier, self.value, self.bound, self.classification]


@dataclass
class ObstructionReport:
    """Per-orbit or per-loop functional values with their truncation bounds."""

    source: str
    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, identifier, value, bound, margin=OBSTRUCTION_MARGIN):
        self.records.append(ObstructionRecord(str(identifier), float(value), float(bound), margin))

    @property
    def verdict(self):
        if any(r.classification == OBSTRUCTION for r in self.records):
            return OBSTRUCTION
        return NO_OBSTRUCTION

    @property
    def max_abs_value(self):
        return max((abs(r.value) for r in self.records), default=0.0)

    def header(self):
        return ["id", "value", "bound", "classification"]

    def rows(self):
        return [r.to_row() for r in self.records]

    def to_record(self):
        return {
            "source": self.source,
            "verdict": self.verdict,
            "max_abs_value": self.max_abs_value,
            "metadata": self.metadata,
            "records": [
                {"id": r.identifier, "value": r.value, "bound": r.bound, "classification": r.classification}
                for r in self.records
            ],
        }
