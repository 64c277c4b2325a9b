"""Common error base for the toolkit.

Every domain error carries a short machine-readable ``code`` of the form
``<module>.<kind>`` so the CLI can emit structured error reports.
"""


class ScanforgeError(Exception):
    """Base class for all domain errors raised by scanforge."""

    code = "scanforge.error"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self)}
