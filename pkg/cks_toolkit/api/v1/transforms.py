"""Transform endpoints: catalog, Legendre transforms, weight sequences, equivalence."""
import logging
from typing import List

from fastapi import APIRouter, Depends
from fastapi.responses import JSONResponse

from cks_toolkit.core.dependencies import get_logger
from cks_toolkit.infra.files import to_jsonable
from cks_toolkit.models.schemas import (
    AlphaRequest,
    AlphaResponse,
    CatalogEntry,
    DualRequest,
    DualResponse,
    EquivRequest,
    LegendreRequest,
    LegendreResponse,
)
from cks_toolkit.services.equivalence import find_equivalence
from cks_toolkit.services.growth import CATALOG, from_spec
from cks_toolkit.services.legendre import dual_legendre_at, legendre_at
from cks_toolkit.services.sequences import alpha_from_growth

router = APIRouter()


def _json(model) -> JSONResponse:
    # log values may be -inf, which plain JSON cannot carry
    return JSONResponse(content=to_jsonable(model))


@router.get("/catalog", response_model=List[CatalogEntry])
def list_catalog():
    """Catalog growth functions with their parameters."""
    return [CatalogEntry(name=name, params=meta["params"], formula=meta["formula"]) for name, meta in sorted(CATALOG.items())]


@router.post("/legendre")
def legendre(request: LegendreRequest, logger: logging.Logger = Depends(get_logger)):
    """l_u(t) for one growth function."""
    u = from_spec(request.function)
    value = legendre_at(u, request.t)
    logger.info(f"l_u({request.t:g}) of {u.descriptor} = {value.logv:.6g} (log)")
    return _json(LegendreResponse(subject=u.descriptor, t=request.t, log_ell=value.logv, ell=value.to_real()))


@router.post("/dual")
def dual(request: DualRequest, logger: logging.Logger = Depends(get_logger)):
    """log u*(r) for one growth function."""
    u = from_spec(request.function)
    value = dual_legendre_at(u, request.r)
    logger.info(f"log u*({request.r:g}) of {u.descriptor} = {value.logv:.6g}")
    return _json(DualResponse(subject=u.descriptor, r=request.r, log_value=value.logv))


@router.post("/alpha")
def alpha(request: AlphaRequest):
    """log alpha(0..N) built from a growth function."""
    u = from_spec(request.function)
    seq = alpha_from_growth(u, request.N)
    return _json(AlphaResponse(subject=u.descriptor, N=request.N, log_alpha=seq.log_alpha))


@router.post("/equiv")
def equiv(request: EquivRequest, logger: logging.Logger = Depends(get_logger)):
    """Equivalence certificate between two growth functions on a grid."""
    u = from_spec(request.function)
    v = from_spec(request.other)
    certificate = find_equivalence(u, v, request.rmin, request.rmax, request.points)
    logger.info(f"{u.descriptor} ~ {v.descriptor}: holds={certificate.holds}")
    return _json(certificate)
