# Omega Engine - Database Service Layer
# Baseline cache and run records

from typing import List, Dict, Any, Optional
from datetime import datetime
from fractions import Fraction
from sqlalchemy.orm import Session as DBSession
from .models import BaselineCache, AnalysisRun, RunArtifact, init_db, get_session_maker


class DatabaseService:
    """
    Service layer for database operations.
    Cached baselines never change a computed value; they only save recomputation.
    """

    def __init__(self, database_url: str = "sqlite:///db/omega_cache.db"):
        self.engine = init_db(database_url)
        self.SessionMaker = get_session_maker(self.engine)

    def get_session(self) -> DBSession:
        """Get a new database session"""
        return self.SessionMaker()

    # ============= BASELINE CACHE =============

    def get_baselines(self, canonical_code: str) -> Optional[Dict[str, Any]]:
        """Cached baselines of a tree shape, or None"""
        db = self.get_session()
        try:
            row = db.query(BaselineCache).filter(BaselineCache.canonical_code == canonical_code).first()
            return self._baseline_to_dict(row) if row else None
        finally:
            db.close()

    def put_baselines(
        self,
        canonical_code: str,
        n: int,
        d_min: int,
        v_rla: Fraction,
        d_max: Optional[int] = None,
        provenance: Optional[Dict[str, str]] = None,
    ) -> None:
        """Insert or complete a cache entry; a known D_max is never overwritten with None"""
        db = self.get_session()
        try:
            row = db.query(BaselineCache).filter(BaselineCache.canonical_code == canonical_code).first()
            if row is None:
                row = BaselineCache(
                    canonical_code=canonical_code,
                    n=n,
                    d_min=d_min,
                    v_num=str(v_rla.numerator),
                    v_den=str(v_rla.denominator),
                    d_max=d_max,
                    provenance=provenance or {},
                )
                db.add(row)
            elif d_max is not None and row.d_max is None:
                row.d_max = d_max
                row.provenance = {**(row.provenance or {}), **(provenance or {})}
            db.commit()
        finally:
            db.close()

    def count_baselines(self) -> int:
        db = self.get_session()
        try:
            return db.query(BaselineCache).count()
        finally:
            db.close()

    # ============= RUN RECORDS =============

    def start_run(self, command: str, seed: int, config: Dict[str, Any]) -> int:
        """Record a new run and return its id"""
        db = self.get_session()
        try:
            run = AnalysisRun(command=command, seed=seed, config=config, status="running")
            db.add(run)
            db.commit()
            db.refresh(run)
            return run.id
        finally:
            db.close()

    def finish_run(self, run_id: int, status: str = "success", error: str = None) -> None:
        db = self.get_session()
        try:
            run = db.query(AnalysisRun).filter(AnalysisRun.id == run_id).first()
            if not run:
                raise ValueError(f"Run {run_id} not found")
            run.status = status
            run.error = error
            run.finished_at = datetime.utcnow()
            db.commit()
        finally:
            db.close()

    def add_artifact(self, run_id: int, kind: str, path: str, rows: int = None) -> None:
        db = self.get_session()
        try:
            db.add(RunArtifact(run_id=run_id, kind=kind, path=path, rows=rows))
            db.commit()
        finally:
            db.close()

    def list_runs(self, command: str = None, limit: int = 50) -> List[Dict[str, Any]]:
        """Most recent runs first"""
        db = self.get_session()
        try:
            query = db.query(AnalysisRun)
            if command:
                query = query.filter(AnalysisRun.command == command)
            runs = query.order_by(AnalysisRun.id.desc()).limit(limit).all()
            return [self._run_to_dict(run) for run in runs]
        finally:
            db.close()

    # ============= HELPER METHODS =============

    def _baseline_to_dict(self, row: BaselineCache) -> Dict[str, Any]:
        return {
            "n": row.n,
            "d_min": row.d_min,
            "d_max": row.d_max,
            "v_rla": Fraction(int(row.v_num), int(row.v_den)),
            "provenance": dict(row.provenance or {}),
        }

    def _run_to_dict(self, run: AnalysisRun) -> Dict[str, Any]:
        return {
            "id": run.id,
            "command": run.command,
            "seed": run.seed,
            "status": run.status,
            "error": run.error,
            "started_at": run.started_at.isoformat() if run.started_at else None,
            "finished_at": run.finished_at.isoformat() if run.finished_at else None,
            "artifacts": [
                {"kind": a.kind, "path": a.path, "rows": a.rows} for a in run.artifacts
            ],
        }
