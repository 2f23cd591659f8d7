"""Run the service: python -m coqex_service"""

import uvicorn

from .app import create_app
from .config import from_env


def main() -> None:
    config = from_env()
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")


if __name__ == "__main__":
    main()
