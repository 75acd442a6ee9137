"""
Record builders shared by the test modules
"""
from src.model import ElementRef, RefactoringKind, RefactoringRecord


def method(class_fqn: str, signature: str) -> ElementRef:
    return ElementRef.for_method(class_fqn, signature)


def field(class_fqn: str, name: str) -> ElementRef:
    return ElementRef.for_field(class_fqn, name)


def rec(record_id, kind, source, target, project="demo", commit="a1b2c3", timestamp=None) -> RefactoringRecord:
    return RefactoringRecord(
        id=record_id,
        project=project,
        commit=commit,
        timestamp=timestamp,
        kind=RefactoringKind(kind),
        source=source,
        target=target,
    )
