from sqlalchemy import Column, Integer, String, Text, DateTime, Boolean
from sqlalchemy.orm import declarative_base
from datetime import datetime

Base = declarative_base()

class ExperimentRun(Base):
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)

    # What was run
    experiment = Column(String(50), nullable=False, index=True)  # "molmer", "teleport", ...
    seed = Column(String(24), nullable=False)  # u64 does not fit a signed BIGINT
    parameters = Column(Text)  # JSON string of the effective parameters

    # Lifecycle
    started_at = Column(DateTime, default=datetime.utcnow, index=True)
    completed_at = Column(DateTime)
    status = Column(String(20), nullable=False)  # "running", "completed", "failed"

    # Outcome
    passed = Column(Boolean)
    report_path = Column(Text)
    error_message = Column(Text)

    def __repr__(self):
        return f"<ExperimentRun(id={self.id}, experiment={self.experiment}, status={self.status}, passed={self.passed})>"
