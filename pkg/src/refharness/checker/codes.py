"""Diagnostic kinds and their numeric codes.

The micro-checker emits only the first seven kinds.  The remaining entries are
kinds external checkers are known to report; they are listed so fixtures and
tests can build keys without repeating magic numbers.
"""

from __future__ import annotations

from .model import DiagnosticKey

PARSING_FAILURE = DiagnosticKey("Parsing failure", 404)
UNBOUND_NAME = DiagnosticKey("Unbound name", 10)
UNDEFINED_ATTRIBUTE = DiagnosticKey("Undefined attribute", 16)
UNSUPPORTED_OPERAND = DiagnosticKey("Unsupported operand", 58)
MISSING_RETURN_ANNOTATION = DiagnosticKey("Missing return annotation", 3)
MISSING_PARAMETER_ANNOTATION = DiagnosticKey("Missing parameter annotation", 2)
MISSING_ATTRIBUTE_ANNOTATION = DiagnosticKey("Missing attribute annotation", 4)

MICRO_KEYS = (
    PARSING_FAILURE,
    UNBOUND_NAME,
    UNDEFINED_ATTRIBUTE,
    UNSUPPORTED_OPERAND,
    MISSING_RETURN_ANNOTATION,
    MISSING_PARAMETER_ANNOTATION,
    MISSING_ATTRIBUTE_ANNOTATION,
)

MISSING_GLOBAL_ANNOTATION = DiagnosticKey("Missing global annotation", 5)
INCOMPATIBLE_PARAMETER_TYPE = DiagnosticKey("Incompatible parameter type", 6)
INCOMPATIBLE_VARIABLE_TYPE = DiagnosticKey("Incompatible variable type", 9)
INCONSISTENT_OVERRIDE = DiagnosticKey("Inconsistent override", 14)
UNEXPECTED_KEYWORD = DiagnosticKey("Unexpected keyword", 28)
CALL_ERROR = DiagnosticKey("Call error", 29)
INVALID_CLASS_INSTANTIATION = DiagnosticKey("Invalid class instantiation", 45)

KNOWN_KEYS = {k.kind: k for k in (
    *MICRO_KEYS,
    MISSING_GLOBAL_ANNOTATION,
    INCOMPATIBLE_PARAMETER_TYPE,
    INCOMPATIBLE_VARIABLE_TYPE,
    INCONSISTENT_OVERRIDE,
    UNEXPECTED_KEYWORD,
    CALL_ERROR,
    INVALID_CLASS_INSTANTIATION,
)}
