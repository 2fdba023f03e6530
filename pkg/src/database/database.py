from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, Session
from typing import Any, Dict, List, Optional
from datetime import datetime
import json
import logging

from .models import Base, ExperimentRun
from src.utils.helpers import to_jsonable

logger = logging.getLogger(__name__)


class DatabaseManager:
    """Run ledger: one row per CLI invocation, never consulted by the experiments"""

    def __init__(self, url: str):
        self.engine = create_engine(url, echo=False)
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)

    def init_db(self):
        """Initialize database tables"""
        Base.metadata.create_all(bind=self.engine)
        logger.info("Run ledger initialized")

    def get_session(self) -> Session:
        """Get a database session"""
        return self.SessionLocal()

    def log_run_start(self, experiment: str, seed: int, parameters: Dict[str, Any]) -> int:
        """Log the start of a run and return its id"""
        with self.get_session() as db:
            run = ExperimentRun(
                experiment=experiment,
                seed=str(seed),
                parameters=json.dumps(to_jsonable(parameters), sort_keys=True),
                status="running"
            )
            db.add(run)
            db.commit()
            db.refresh(run)
            return run.id

    def log_run_end(self, run_id: int, passed: Optional[bool] = None, report_path: Optional[str] = None,
                    error: Optional[str] = None):
        """Log the end of a run"""
        with self.get_session() as db:
            run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
            if run:
                run.completed_at = datetime.utcnow()
                run.status = "failed" if error else "completed"
                run.passed = passed
                run.report_path = report_path
                run.error_message = error
                db.commit()
            else:
                logger.warning(f"No ledger entry with id {run_id}")

    def get_runs(self,
                 limit: int = 50,
                 experiment: Optional[str] = None,
                 status: Optional[str] = None) -> List[ExperimentRun]:
        """Get runs with filters, newest first"""
        with self.get_session() as db:
            query = db.query(ExperimentRun)

            if experiment:
                query = query.filter(ExperimentRun.experiment == experiment)
            if status:
                query = query.filter(ExperimentRun.status == status)

            return query.order_by(ExperimentRun.id.desc()).limit(limit).all()

    def get_run_count(self, experiment: Optional[str] = None) -> int:
        """Get count of runs"""
        with self.get_session() as db:
            query = db.query(ExperimentRun)
            if experiment:
                query = query.filter(ExperimentRun.experiment == experiment)
            return query.count()
