import logging

import numpy as np
from flask import Flask
from flask.json.provider import DefaultJSONProvider

from app.config import Config


class _NumpyJSONProvider(DefaultJSONProvider):
    """Serialize numpy scalars/arrays and complex numbers so app.json works transparently."""

    @staticmethod
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, complex):
            return str(o)
        return DefaultJSONProvider.default(o)


def create_app(config_class=Config):
    app = Flask(__name__)
    app.json_provider_class = _NumpyJSONProvider
    app.json = _NumpyJSONProvider(app)
    app.config.from_object(config_class)

    logging.basicConfig(
        level=app.config.get("LOG_LEVEL", "WARNING"),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    # Register CLI commands (`flask sim ...`)
    from app.cli import sim_cli

    app.cli.add_command(sim_cli)

    return app
