#!/usr/bin/env python3
"""
ALH mass service launcher

Usage:
    python run_server.py

The HTTP API is served at http://localhost:8000/api (catalog, mass, check, boost).
"""

import os
import sys

import uvicorn


def main():
    script_dir = os.path.dirname(os.path.abspath(__file__))
    os.chdir(script_dir)

    print("Starting ALH mass service on http://localhost:8000/api")
    try:
        uvicorn.run(
            "alh.main:app",
            host="0.0.0.0",
            port=int(os.environ.get("PORT", "8000")),
            reload=True,
            reload_dirs=["alh"],
            log_level="info"
        )
    except KeyboardInterrupt:
        print("\nServer stopped by user")
    except Exception as e:
        print(f"\nError starting server: {e}")
        sys.exit(1)

if __name__ == "__main__":
    main()
