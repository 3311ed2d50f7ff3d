import hashlib
import os
from typing import Optional

from wavelet_amp.utils.logger import logger

log = logger(__name__)


class HashComparator:
    """Content hashes for run artifacts, with a `.hash` record per directory."""

    def __init__(self, hash_algorithm="sha256"):
        self.hash_algorithm = hash_algorithm

    def check_file(self, record_dir: str, file_path: str) -> bool:
        """Compares the stored hash with the current hash of the file."""
        old_hash = self.read(record_dir)
        log.info(f"old_hash: {old_hash}")
        if old_hash is None:
            return False

        new_hash = self.hash_file(file_path)
        log.info(f"new_hash: {new_hash}")
        return self.compare(old_hash, new_hash)

    def hash_file(self, file_path: str) -> str:
        """Calculate the hash value of a file using streaming."""
        hasher = hashlib.new(self.hash_algorithm)
        with open(file_path, "rb") as f:
            while chunk := f.read(4096):
                hasher.update(chunk)
        return hasher.hexdigest()

    def read(self, record_dir: str) -> Optional[str]:
        """Read the hash value stored in the directory's `.hash` file."""
        log.debug(f"reading hash: {record_dir}")
        hash_file = os.path.join(record_dir, ".hash")

        try:
            with open(hash_file, "r") as f:
                return f.read().strip()
        except FileNotFoundError:
            log.debug(f"hash file not found: {hash_file}")
            return None

    def write(self, hash_value: str, record_dir: str):
        """Write the hash value to a `.hash` file in the specified directory."""
        log.debug(f"writing hash: {record_dir}")
        os.makedirs(record_dir, exist_ok=True)
        with open(os.path.join(record_dir, ".hash"), "w") as f:
            f.write(hash_value)

    def compare(self, hash_value1: str, hash_value2: str) -> bool:
        """Compares two hash values."""
        return hash_value1 == hash_value2
