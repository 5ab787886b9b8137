"""
Domain events of a federation run.

Events carry only public quantities: released labels, counts and final
privacy figures. Scores and margins stay inside the trust boundary.
"""
from pydantic import BaseModel
from typing import Optional


class TeachersTrainedEvent(BaseModel):
    """Event generated when all local teachers are ready."""
    run_id: str
    scheme: str
    num_agents: int


class QueryAnsweredEvent(BaseModel):
    """Event generated when a public query receives its released label."""
    run_id: str
    query_id: int
    released_label: int


class RoundCompletedEvent(BaseModel):
    """Event generated after each FedAvg round."""
    run_id: str
    round_index: int
    sampled_agents: int


class PrivacyReportReadyEvent(BaseModel):
    """Event generated when the accountant has produced the run's report."""
    run_id: str
    epsilon: float
    delta: float
    epsilon_data_dependent: Optional[float] = None


class RunCompletedEvent(BaseModel):
    """Event generated when a run report is assembled."""
    run_id: str
    scheme: str
    test_accuracy: float
    epsilon: Optional[float] = None
