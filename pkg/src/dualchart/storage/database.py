"""
SQLAlchemy engine and session factory for a ledger file.
"""
import logging
from pathlib import Path

from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import Session, sessionmaker

logger = logging.getLogger(__name__)


def database_url(db_path: Path) -> str:
    return f"sqlite:///{Path(db_path)}"


def make_engine(db_path: Path) -> Engine:
    url = database_url(db_path)
    logger.debug(f"Opening ledger database {url}")
    return create_engine(url, connect_args={"check_same_thread": False})


def make_session_factory(engine: Engine) -> sessionmaker[Session]:
    return sessionmaker(autocommit=False, autoflush=False, bind=engine)
