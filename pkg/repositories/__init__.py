# Repositories package for spec and report files

from .spec_repository import GameSpecRepository
from .report_repository import ReportRepository

__all__ = [
    'GameSpecRepository',
    'ReportRepository'
]
