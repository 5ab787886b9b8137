"""
File parsers for veilvote inputs.
"""
from veilvote.infrastructure.parsers.parser_factory import ParserFactory, DataParser, create_parser_factory
from veilvote.infrastructure.parsers.vvft_parser import VvftParser, read_vvft, write_vvft
from veilvote.infrastructure.parsers.csv_parsers import LabelsCsvParser, MarginsCsvParser
from veilvote.infrastructure.parsers.yaml_parser import YamlParser

__all__ = [
    'ParserFactory',
    'DataParser',
    'create_parser_factory',
    'VvftParser',
    'read_vvft',
    'write_vvft',
    'LabelsCsvParser',
    'MarginsCsvParser',
    'YamlParser'
]
