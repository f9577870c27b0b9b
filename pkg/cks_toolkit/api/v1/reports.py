"""Condition report endpoint."""
import logging

from fastapi import APIRouter, Depends
from fastapi.responses import JSONResponse

from cks_toolkit.core.config import Settings
from cks_toolkit.core.dependencies import get_logger, get_settings
from cks_toolkit.infra.files import report_payload, to_jsonable
from cks_toolkit.models.schemas import CheckRequest
from cks_toolkit.services.growth import from_spec
from cks_toolkit.services.report_service import full_report
from cks_toolkit.services.sequences import user_sequence

router = APIRouter()


@router.post("/check")
def check(
    request: CheckRequest,
    logger: logging.Logger = Depends(get_logger),
    settings: Settings = Depends(get_settings),
):
    """
    Full condition report for a growth function or an explicit log alpha sequence.

    Verdicts that cannot be settled come back as INCONCLUSIVE entries, not errors.
    """
    if request.sequence is not None:
        subject = user_sequence(request.sequence, descriptor="request")
        N = request.N
    else:
        subject = from_spec(request.function)
        N = request.N or settings.default_table_depth
    report = full_report(subject, N)
    logger.info(f"Condition report for {report.subject}: {len(report.inconsistencies)} inconsistencies")
    return JSONResponse(content=to_jsonable(report_payload(report, settings.app_version)))
