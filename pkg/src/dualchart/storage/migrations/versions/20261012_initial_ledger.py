"""Initial ledger schema

Revision ID: 20261012_initial
Revises: 
Create Date: 2026-10-12 00:00:00.000000

"""
from alembic import op
import sqlalchemy as sa

# revision identifiers, used by Alembic.
revision = '20261012_initial'
down_revision = None
branch_labels = None
depends_on = None


def upgrade() -> None:
    op.create_table(
        'runs',
        sa.Column('id', sa.Integer(), primary_key=True),
        sa.Column('seed', sa.Integer(), nullable=False),
        sa.Column('config_path', sa.String(255), nullable=True),
        sa.Column('output_dir', sa.String(255), nullable=False),
        sa.Column('constants', sa.Text(), nullable=False),
        sa.Column('passed', sa.Boolean(), nullable=False),
        sa.Column('created_at', sa.DateTime(timezone=True), server_default=sa.func.now(), nullable=False),
    )

    op.create_table(
        'suite_records',
        sa.Column('id', sa.Integer(), primary_key=True),
        sa.Column('run_id', sa.Integer(), sa.ForeignKey('runs.id', ondelete='CASCADE'), nullable=False),
        sa.Column('name', sa.String(50), nullable=False),
        sa.Column('passed', sa.Boolean(), nullable=False),
        sa.Column('error', sa.Text(), nullable=True),
    )
    op.create_index('ix_suite_records_run_id', 'suite_records', ['run_id'])

    op.create_table(
        'check_records',
        sa.Column('id', sa.Integer(), primary_key=True),
        sa.Column('suite_id', sa.Integer(), sa.ForeignKey('suite_records.id', ondelete='CASCADE'), nullable=False),
        sa.Column('name', sa.String(200), nullable=False),
        sa.Column('value', sa.Float(), nullable=True),
        sa.Column('comparison', sa.String(4), nullable=False),
        sa.Column('threshold', sa.Float(), nullable=False),
        sa.Column('passed', sa.Boolean(), nullable=False),
    )
    op.create_index('ix_check_records_suite_id', 'check_records', ['suite_id'])


def downgrade() -> None:
    op.drop_index('ix_check_records_suite_id', 'check_records')
    op.drop_table('check_records')
    op.drop_index('ix_suite_records_run_id', 'suite_records')
    op.drop_table('suite_records')
    op.drop_table('runs')
