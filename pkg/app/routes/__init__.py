from app.routes.root import router as root_router
from app.routes.params import router as params_router
from app.routes.fibers import router as fibers_router
from app.routes.energy import router as energy_router
from app.routes.minimize import router as minimize_router


__all__ = [
    "root_router",
    "params_router",
    "fibers_router",
    "energy_router",
    "minimize_router",
]
