from .app import ServiceState, create_app, create_app_from_env, load_state

__all__ = ["ServiceState", "create_app", "create_app_from_env", "load_state"]
