"""
Query handlers for the privacy accountant.
"""
from typing import List, Optional

from veilvote.application.queries.accounting_queries import AccountPrivacyQuery, CalibrateSigmaQuery
from veilvote.domain.models.privacy import Granularity, MarginRecord, MechanismParams, PrivacyReport, Scheme
from veilvote.domain.services import privacy_accountant
from veilvote.infrastructure.logging import get_logger, log_errors, log_execution_time
from veilvote.infrastructure.parsers.csv_parsers import MarginsCsvParser
from veilvote.infrastructure.query_bus import QueryHandler


class AccountPrivacyQueryHandler(QueryHandler[AccountPrivacyQuery, PrivacyReport]):
    """Handler for AccountPrivacyQuery."""

    def __init__(self, margins_parser: MarginsCsvParser):
        self.margins_parser = margins_parser
        self.logger = get_logger("accounting.account")

    def _margins(self, query: AccountPrivacyQuery) -> Optional[List[MarginRecord]]:
        if query.margins_path is not None:
            return self.margins_parser.parse(query.margins_path)
        if query.margins is not None:
            return [MarginRecord(query_id=i, gamma=gamma) for i, gamma in enumerate(query.margins)]
        return None

    @log_execution_time(operation_name="account_privacy")
    @log_errors(reraise=True)
    def handle(self, query: AccountPrivacyQuery) -> PrivacyReport:
        params = MechanismParams(
            sigma=query.sigma,
            queries=query.queries,
            num_agents=query.num_agents,
            k=query.k,
            num_classes=query.num_classes,
            granularity=Granularity(query.granularity),
        )
        margins = self._margins(query)
        report = privacy_accountant.report_for_scheme(
            params, Scheme.parse(query.scheme), query.delta, margins=margins, bound=query.bound
        )
        self.logger.info(
            "Privacy accounted",
            context={
                "scheme": query.scheme,
                "queries": query.queries,
                "epsilon": report.epsilon,
                "epsilon_data_dependent": report.epsilon_data_dependent,
            },
        )
        return report


class CalibrateSigmaQueryHandler(QueryHandler[CalibrateSigmaQuery, float]):
    """Handler for CalibrateSigmaQuery."""

    @log_execution_time(operation_name="calibrate_sigma", include_result=True)
    @log_errors(reraise=True)
    def handle(self, query: CalibrateSigmaQuery) -> float:
        return privacy_accountant.sigma_for_target_epsilon(
            query.releases,
            query.epsilon,
            query.delta,
            scheme=Scheme.parse(query.scheme),
            granularity=Granularity(query.granularity),
            k=query.k,
        )
