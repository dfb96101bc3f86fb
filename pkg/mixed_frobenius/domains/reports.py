"""
Verification records produced by the axiom checkers.

A checker returns a VerificationReport holding one AxiomRecord per axiom. A
failing axiom is data, not an exception: the record carries the first
counterexample found and the order up to which the check was carried out.
"""

from dataclasses import dataclass, field
from typing import List, Optional


@dataclass(frozen=True)
class AxiomRecord:
    """
    Outcome of a single axiom check.

    Attributes:
        name (str): Axiom identifier, e.g. 'ideal I_0' or 'associativity'
        passed (bool): Whether the axiom holds
        certified_order (Optional[int]): Truncation order up to which the check
            is exact; None for checks that are exact without truncation
        counterexample (Optional[str]): Human-readable locus of the first failure
    """
    name: str
    passed: bool
    certified_order: Optional[int] = None
    counterexample: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'certified_order': self.certified_order,
            'counterexample': self.counterexample,
        }


@dataclass
class VerificationReport:
    records: List[AxiomRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    def add(
        self,
        name: str,
        passed: bool,
        certified_order: Optional[int] = None,
        counterexample: Optional[str] = None
    ) -> AxiomRecord:
        record = AxiomRecord(name, bool(passed), certified_order, None if passed else counterexample)
        self.records.append(record)
        return record

    def extend(self, other: 'VerificationReport', prefix: str = '') -> None:
        for record in other.records:
            self.records.append(AxiomRecord(
                f"{prefix}{record.name}",
                record.passed,
                record.certified_order,
                record.counterexample,
            ))

    def failures(self) -> List[AxiomRecord]:
        return [record for record in self.records if not record.passed]

    def get(self, name: str) -> Optional[AxiomRecord]:
        for record in self.records:
            if record.name == name:
                return record
        return None

    def failed_names(self) -> List[str]:
        return [record.name for record in self.failures()]
