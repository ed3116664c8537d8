import logging
import time
from typing import Tuple
from urllib.parse import urlsplit

import requests


def normalize_endpoint(endpoint: str) -> str:
    """Return the collector base URL with scheme and without a trailing path."""
    if not endpoint.startswith(("http://", "https://")):
        endpoint = f"http://{endpoint}"
    parts = urlsplit(endpoint)
    return f"{parts.scheme}://{parts.netloc}"


def check_otlp_connection(
    endpoint: str, max_retries: int = 3, retry_delay: float = 2.0
) -> Tuple[bool, str]:
    """
    Check an OTLP/HTTP collector before any exporter is attached to it.

    The first attempt times out after 5 seconds, later attempts after 2.

    Args:
        endpoint (str): Collector URL as given in OTEL_EXPORTER_OTLP_ENDPOINT.
        max_retries (int): Number of attempts.
        retry_delay (float): Seconds to wait between attempts.

    Returns:
        Tuple[bool, str]: (reachable, normalized base URL)
    """
    base_url = normalize_endpoint(endpoint)
    logs_url = f"{base_url}/v1/logs"

    for attempt in range(max_retries):
        try:
            response = requests.post(
                logs_url,
                data=b"",
                headers={"Content-Type": "application/x-protobuf"},
                timeout=5 if attempt == 0 else 2,
            )
            # Any HTTP answer below 500 means a collector is listening.
            if response.status_code < 500:
                return True, base_url
            raise requests.HTTPError(f"HTTP {response.status_code}")
        except requests.RequestException as e:
            if attempt < max_retries - 1:
                logging.warning(
                    f"OTLP collector at {base_url} not reachable "
                    f"(attempt {attempt + 1}/{max_retries}): {e}; retrying in {retry_delay}s"
                )
                time.sleep(retry_delay)
            else:
                logging.warning(
                    f"OTLP collector at {base_url} not reachable after {max_retries} attempts: {e}"
                )
    return False, base_url
