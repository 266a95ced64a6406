from typing import Any, Callable, Dict, List, Optional

_backgrounds: Dict[str, Callable[..., Any]] = {}


def register_background(name: str, builder: Callable[..., Any]) -> None:
	_backgrounds[name] = builder

def get_background(name: str) -> Optional[Callable[..., Any]]:
	return _backgrounds.get(name)

def background_names() -> List[str]:
	return sorted(_backgrounds)
