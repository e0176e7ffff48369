"""Reference HTTP server for the image prediction wire protocol."""

from .app import MAX_BATCH, ServerConfig, create_app
from .models import LoadedModel, load_model

__version__ = "0.1.0"
