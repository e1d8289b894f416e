# Omega Engine - Database Models

from sqlalchemy import create_engine, Column, Integer, String, Text, DateTime, ForeignKey, JSON
from sqlalchemy.orm import declarative_base, sessionmaker, relationship
from datetime import datetime
import os

Base = declarative_base()


class BaselineCache(Base):
    """Baselines of one unlabelled tree shape, keyed by its canonical code"""
    __tablename__ = "baseline_cache"

    id = Column(Integer, primary_key=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    canonical_code = Column(Text, nullable=False, unique=True, index=True)
    n = Column(Integer, nullable=False)
    d_min = Column(Integer, nullable=False)
    d_max = Column(Integer, nullable=True)  # only when it was requested and within the cap

    # V_rla as an exact fraction
    v_num = Column(Text, nullable=False)
    v_den = Column(Text, nullable=False)

    provenance = Column(JSON, default=dict)


class AnalysisRun(Base):
    """One CLI run"""
    __tablename__ = "analysis_runs"

    id = Column(Integer, primary_key=True)
    started_at = Column(DateTime, default=datetime.utcnow)
    finished_at = Column(DateTime, nullable=True)

    command = Column(String(50))  # analyze, significance, trend, rank, extremal, oracle
    seed = Column(Integer)
    config = Column(JSON, default=dict)
    status = Column(String(20), default="running")  # running, success, error
    error = Column(Text, nullable=True)

    artifacts = relationship("RunArtifact", back_populates="run")


class RunArtifact(Base):
    """A file written by a run"""
    __tablename__ = "run_artifacts"

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("analysis_runs.id"))
    created_at = Column(DateTime, default=datetime.utcnow)

    kind = Column(String(50))  # table name, "hasse", "oracle", ...
    path = Column(Text)
    rows = Column(Integer, nullable=True)

    run = relationship("AnalysisRun", back_populates="artifacts")


# Database initialization
def init_db(database_url="sqlite:///db/omega_cache.db"):
    """Initialize the database"""
    if database_url.startswith("sqlite:///") and database_url != "sqlite:///:memory:":
        directory = os.path.dirname(database_url[len("sqlite:///"):])
        if directory:
            os.makedirs(directory, exist_ok=True)
    engine = create_engine(database_url)
    Base.metadata.create_all(engine)
    return engine


def get_session_maker(engine):
    """Get a session maker for the database"""
    return sessionmaker(bind=engine, expire_on_commit=False)
