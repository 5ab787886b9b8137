"""
Factory for input file parsers.
"""
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, List, Union

from veilvote.domain.exceptions import ConfigError

PathLike = Union[str, Path]


class DataParser(ABC):
    """Base interface for input parsers."""

    @abstractmethod
    def can_parse(self, file_path: PathLike) -> bool:
        """
        Check if parser can handle the given file.

        Args:
            file_path: Path to the file

        Returns:
            True if parser can handle the file, False otherwise
        """

    @abstractmethod
    def parse(self, file_path: PathLike) -> Any:
        """
        Parse file contents.

        Args:
            file_path: Path to the file

        Returns:
            Parsed contents (array, frame or mapping depending on the parser)
        """


class ParserFactory:
    """Factory for selecting parsers based on file type and header."""

    def __init__(self):
        self.parsers: List[DataParser] = []

    def register_parser(self, parser: DataParser) -> None:
        """
        Register a parser in the factory.

        Args:
            parser: Parser instance to register
        """
        self.parsers.append(parser)

    def get_parser(self, file_path: PathLike) -> DataParser:
        """
        Get appropriate parser for the given file.

        Args:
            file_path: Path to the file

        Returns:
            Parser that can handle the file

        Raises:
            ConfigError: If the file is missing or no parser accepts it
        """
        if not Path(file_path).exists():
            raise ConfigError(f"file not found: {file_path}")
        for parser in self.parsers:
            if parser.can_parse(file_path):
                return parser
        raise ConfigError(f"Unsupported file format: {file_path}")

    def parse(self, file_path: PathLike) -> Any:
        return self.get_parser(file_path).parse(file_path)


def create_parser_factory() -> ParserFactory:
    """Factory with every input parser registered."""
    from veilvote.infrastructure.parsers.csv_parsers import LabelsCsvParser, MarginsCsvParser
    from veilvote.infrastructure.parsers.vvft_parser import VvftParser
    from veilvote.infrastructure.parsers.yaml_parser import YamlParser

    factory = ParserFactory()
    for parser in (VvftParser(), LabelsCsvParser(), MarginsCsvParser(), YamlParser()):
        factory.register_parser(parser)
    return factory
