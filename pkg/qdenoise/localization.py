import gettext
import locale
import os
from typing import Callable, List, Optional

DOMAIN = 'qdenoise'
LANGUAGE_ENV = 'QDEN_LANGUAGE'


class LocalizationManager:
    def __init__(self, language_code: Optional[str] = None):
        self.locales_dir = os.path.join(os.path.dirname(__file__), 'locales')
        self.available_languages = self._find_available_languages()
        self.language_code = language_code
        self.translator: Callable[[str], str] = self._get_translator()

    def _find_available_languages(self) -> List[str]:
        """Finds compiled catalogs by scanning the locales directory."""
        languages = ['en']
        if os.path.isdir(self.locales_dir):
            for lang in os.listdir(self.locales_dir):
                if os.path.isdir(os.path.join(self.locales_dir, lang, 'LC_MESSAGES')):
                    languages.append(lang)
        return sorted(set(languages))

    def _resolve_language(self) -> str:
        lang_code = self.language_code
        if lang_code is None or lang_code.lower() == 'system':
            try:
                lang_code, _ = locale.getlocale()
            except ValueError:
                lang_code = None
            lang_code = lang_code.split('_')[0] if lang_code else 'en'
        return lang_code

    def _get_translator(self) -> Callable[[str], str]:
        """
        Gets a translator for the configured language, falling back to the
        null translator when no catalog exists.
        """
        translation = gettext.translation(
            DOMAIN,
            localedir=self.locales_dir,
            languages=[self._resolve_language()],
            fallback=True,
        )
        return translation.gettext

    def set_language(self, language_code: Optional[str]):
        self.language_code = language_code
        self.translator = self._get_translator()


def get_translator(language_code: Optional[str] = None) -> Callable[[str], str]:
    """Initializes and returns a translator function."""
    return LocalizationManager(language_code or os.environ.get(LANGUAGE_ENV)).translator


# Global translator instance
_ = get_translator()
