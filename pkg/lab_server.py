from fastmcp import FastMCP

from driftlab.config import list_presets
from driftlab.settings import configure_logging, load_settings
from tools import register_all_tools

# Create a FastMCP server instance
mcp = FastMCP("Drift Lab")

# Register all tools from the tools package
register_all_tools(mcp)


@mcp.resource("config://lab")
def get_lab_config():
    """
    Provide the active lab settings as a resource.
    """
    settings = load_settings()
    return {
        "server_name": "Drift Lab",
        "presets": list_presets(),
        **settings.as_dict(),
    }


# ASGI application for deployment (e.g. `uvicorn lab_server:app`)
app = mcp.http_app()


def main():
    configure_logging()
    settings = load_settings()
    mcp.run(transport="http", host=settings.host, port=settings.port)


if __name__ == "__main__":
    main()
