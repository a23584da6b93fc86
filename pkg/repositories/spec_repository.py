from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union
import hashlib
import json
import logging

from pydantic import ValidationError

from exceptions import InputError, missing_field, non_finite_entry
from models.game import GameSpec, MATRIX_FIELDS

logger = logging.getLogger(__name__)

# n, m1 and m2 are inferred from A, B1 and B2; t defaults to 0
REQUIRED_FIELDS = ("N", "x") + MATRIX_FIELDS


class GameSpecRepository:
    """Repository class for reading and writing game spec files."""

    def __init__(self, encoding: str = "utf-8"):
        """
        Initialize the spec repository.

        Args:
            encoding: Text encoding of spec files
        """
        self.encoding = encoding

    @staticmethod
    def digest(data: bytes) -> str:
        """SHA-256 hex digest of the raw file bytes."""
        return hashlib.sha256(data).hexdigest()

    def load(self, path: Union[str, Path]) -> Tuple[GameSpec, str]:
        """
        Read and parse a spec file.

        Args:
            path: Path of a JSON spec file

        Returns:
            Tuple of the parsed GameSpec and the digest of the file bytes

        Raises:
            InputError: If the file cannot be read or parsed
        """
        path = Path(path)
        try:
            data = path.read_bytes()
        except OSError as e:
            logger.error(f"Cannot read spec file {path}: {e}")
            raise InputError(f"Cannot read spec file {path}: {e.strerror or e}", field="path", value=str(path))

        try:
            text = data.decode(self.encoding)
        except UnicodeDecodeError:
            raise InputError(f"Spec file {path} is not valid {self.encoding} text", field="path", value=str(path))

        spec = self.parse(text, source=str(path))
        return spec, self.digest(data)

    def parse(self, text: str, source: Optional[str] = None) -> GameSpec:
        """
        Parse the JSON text of a spec.

        Args:
            text: JSON document with the fields of GameSpec
            source: Name used in error messages

        Returns:
            GameSpec

        Raises:
            InputError: On syntax errors (with line and column), missing fields
                or malformed values (with the field name)
        """
        where = source or "<string>"
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            logger.error(f"Spec {where} is not valid JSON at line {e.lineno}, column {e.colno}")
            raise InputError(
                f"Invalid JSON in {where} at line {e.lineno}, column {e.colno}: {e.msg}",
                details={"line": e.lineno, "column": e.colno}
            )
        if not isinstance(document, dict):
            raise InputError(f"Spec {where} must be a JSON object")

        for name in REQUIRED_FIELDS:
            if name not in document:
                raise missing_field(name, where)

        return self._build(document, where)

    def _build(self, document: Dict[str, Any], where: str) -> GameSpec:
        try:
            return GameSpec.build(**document)
        except ValidationError as e:
            error = e.errors()[0]
            field = str(error["loc"][0]) if error["loc"] else None
            if field and "NaN or infinite" in error["msg"]:
                raise non_finite_entry(field)
            raise InputError(
                f"Invalid value for field '{field}' in {where}: {error['msg']}",
                field=field,
                details={"error_count": e.error_count()}
            )
        except (TypeError, ValueError, IndexError) as e:
            # shape inference of n, m1, m2 failed before validation
            raise InputError(f"Malformed matrix data in {where}: {e}")

    def save(self, spec: GameSpec, path: Union[str, Path]) -> str:
        """
        Write a spec as JSON.

        Returns:
            Digest of the written bytes
        """
        data = json.dumps(spec.to_document(), indent=2).encode(self.encoding)
        Path(path).write_bytes(data)
        logger.debug(f"Spec written to {path}")
        return self.digest(data)
