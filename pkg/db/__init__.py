from .models import BaselineCache, AnalysisRun, RunArtifact, init_db
from .service import DatabaseService

__all__ = [
    "BaselineCache", "AnalysisRun", "RunArtifact",
    "init_db", "DatabaseService"
]
