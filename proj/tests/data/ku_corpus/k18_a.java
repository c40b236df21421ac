import java.util.Locale;
class K18a {
    Locale here = Locale.getDefault();
    String lang(Locale l) { return l.getLanguage(); }
}
