"""
SQLAlchemy models for the run ledger.

A run owns one record per executed suite, and each suite record owns its
checks. Timestamps live only here, never in the report files.
"""
from datetime import datetime
from typing import List, Optional

from sqlalchemy import Boolean, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, relationship
from sqlalchemy.sql import func


class Base(DeclarativeBase):
    """Base class for all models."""
    pass


class Run(Base):
    """One invocation of the suite runner."""
    __tablename__ = 'runs'

    id: Mapped[int] = mapped_column(primary_key=True)
    seed: Mapped[int] = mapped_column(Integer, nullable=False)
    config_path: Mapped[Optional[str]] = mapped_column(String(255), nullable=True)
    output_dir: Mapped[str] = mapped_column(String(255), nullable=False)
    constants: Mapped[str] = mapped_column(Text, nullable=False)
    passed: Mapped[bool] = mapped_column(Boolean, nullable=False)
    created_at: Mapped[datetime] = mapped_column(DateTime(timezone=True), server_default=func.now(), nullable=False)

    # Relationships
    suites: Mapped[List['SuiteRecord']] = relationship(back_populates='run', cascade='all, delete-orphan',
                                                       order_by='SuiteRecord.id')


class SuiteRecord(Base):
    __tablename__ = 'suite_records'

    id: Mapped[int] = mapped_column(primary_key=True)
    run_id: Mapped[int] = mapped_column(ForeignKey('runs.id', ondelete='CASCADE'), nullable=False)
    name: Mapped[str] = mapped_column(String(50), nullable=False)
    passed: Mapped[bool] = mapped_column(Boolean, nullable=False)
    error: Mapped[Optional[str]] = mapped_column(Text, nullable=True)

    # Relationships
    run: Mapped['Run'] = relationship(back_populates='suites')
    checks: Mapped[List['CheckRecord']] = relationship(back_populates='suite', cascade='all, delete-orphan',
                                                       order_by='CheckRecord.id')


class CheckRecord(Base):
    __tablename__ = 'check_records'

    id: Mapped[int] = mapped_column(primary_key=True)
    suite_id: Mapped[int] = mapped_column(ForeignKey('suite_records.id', ondelete='CASCADE'), nullable=False)
    name: Mapped[str] = mapped_column(String(200), nullable=False)
    value: Mapped[Optional[float]] = mapped_column(Float, nullable=True)
    comparison: Mapped[str] = mapped_column(String(4), nullable=False)
    threshold: Mapped[float] = mapped_column(Float, nullable=False)
    passed: Mapped[bool] = mapped_column(Boolean, nullable=False)

    # Relationships
    suite: Mapped['SuiteRecord'] = relationship(back_populates='checks')
