/**
 * Locale bundles. Turkish is the community's home language; English is the
 * fallback. The active locale is detected from the browser once at boot.
 */

export type Locale = "tr" | "en";

const bundles: Record<Locale, Record<string, string>> = {
  en: {
    "app.title": "Audio Library",
    "app.skip": "Skip to main content",
    "nav.home": "Home",
    "nav.login": "Sign in",
    "nav.apply": "Apply for membership",
    "nav.volunteer": "Volunteer desk",
    "nav.impaired": "My library",
    "nav.admin": "Moderation",
    "nav.messages": "Messages",
    "nav.upload": "Upload recording",
    "nav.logout": "Sign out",
    "status.loading": "Loading…",
    "status.saved": "Saved.",
    "home.news": "News and announcements",
    "home.links": "Links",
    "home.guestbook": "Visitors' page",
    "home.guestbook.name": "Your name",
    "home.guestbook.body": "Your message",
    "home.guestbook.sign": "Sign the guestbook",
    "home.guestbook.signed": "Thank you, your note is on the visitors' page.",
    "home.empty": "Nothing published yet.",
    "login.title": "Sign in",
    "login.username": "User name",
    "login.password": "Password",
    "login.submit": "Sign in",
    "login.welcome": "Signed in as {name}.",
    "login.forgot": "Forgot my password",
    "login.reset.sent": "If the account exists, a reset note was issued.",
    "login.reset.name": "User name or e-mail",
    "login.reset.submit": "Request password reset",
    "apply.title": "Membership application",
    "apply.role": "I am applying as",
    "apply.role.volunteer": "Volunteer reader",
    "apply.role.impaired": "Visually-impaired member",
    "apply.name": "Full name",
    "apply.email": "E-mail address",
    "apply.username": "Desired user name",
    "apply.trial": "One-minute trial recording (MP3)",
    "apply.trial.hint": "Volunteer applications must include a trial recording.",
    "apply.submit": "Submit application",
    "apply.submitted": "Application received. The admins will e-mail your credentials.",
    "volunteer.title": "Volunteer desk",
    "volunteer.demand": "Books waiting for a reader",
    "volunteer.demand.empty": "No books are waiting right now.",
    "volunteer.claim": "Volunteer to record {title}",
    "volunteer.claimed": "Claim filed; an admin will review it.",
    "volunteer.assignments": "Your assigned books",
    "volunteer.assignments.empty": "Nothing assigned to you yet.",
    "volunteer.upload": "Upload a part of {title}",
    "impaired.title": "My library",
    "impaired.search": "Find a book",
    "impaired.search.label": "Search the catalog by title or author",
    "impaired.request": "Ask for a book to be recorded",
    "impaired.request.title": "Book title",
    "impaired.request.author": "Author",
    "impaired.request.submit": "Submit request",
    "impaired.requested": "Request saved. Volunteers can now see it.",
    "impaired.mine": "Your requests",
    "impaired.mine.empty": "You have not requested any books.",
    "impaired.recent": "Recently added parts",
    "impaired.mostly": "Mostly read books",
    "account.title": "Account settings",
    "account.username": "New user name",
    "account.password": "New password (at least 8 characters)",
    "account.submit": "Update credentials",
    "account.updated": "Credentials updated.",
    "admin.title": "Moderation",
    "admin.applications": "Membership applications",
    "admin.claims": "Recording claims",
    "admin.parts": "Submitted parts",
    "admin.queue.empty": "Queue is empty.",
    "admin.approve": "Approve",
    "admin.reject": "Reject",
    "admin.trial.listen": "Listen to trial recording",
    "admin.decided": "Decision applied.",
    "admin.credentials": "Account created for {name}; credentials queued for e-mail.",
    "admin.publish": "Publish to the home page",
    "admin.publish.kind": "Kind",
    "admin.publish.title": "Title",
    "admin.publish.body": "Body or link address",
    "admin.publish.submit": "Publish",
    "admin.published": "Published.",
    "admin.retract": "Retract {title}",
    "admin.guestbook": "Guestbook moderation",
    "admin.hide": "Hide entry",
    "admin.show": "Show entry",
    "admin.complete.book": "Book code to mark complete",
    "admin.complete.submit": "Mark book complete",
    "admin.completed": "Book marked complete.",
    "book.title": "Book {title}",
    "book.parts": "Approved parts",
    "book.parts.empty": "No approved parts yet.",
    "book.listen": "Listen to {name}",
    "book.download": "Download {name}",
    "player.title": "Now playing",
    "player.of": "Part of {title}",
    "player.blocked": "This part is not published.",
    "player.download": "Download this part",
    "upload.title": "Upload a recorded part",
    "upload.book": "Book",
    "upload.book.label": "Pick the assigned book",
    "upload.part.name": "Part name",
    "upload.file": "Audio file (MP3)",
    "upload.start": "Start upload",
    "upload.pause": "Pause",
    "upload.resume": "Resume",
    "upload.progress": "Upload progress",
    "upload.sent": "Part {code} submitted for approval.",
    "upload.paused": "Upload paused.",
    "messages.title": "Messages",
    "messages.inbox": "Inbox",
    "messages.empty": "No messages.",
    "messages.unread": "{n} unread message(s)",
    "messages.to": "To (user name)",
    "messages.body": "Message",
    "messages.send": "Send message",
    "messages.sent": "Message sent.",
    "friends.title": "Friend list",
    "friends.empty": "Your friend list is empty.",
    "friends.add": "Add to friend list (user name)",
    "friends.submit": "Add friend",
    "friends.added": "Added to your friend list.",
    "error.prefix": "Error: {detail}",
    "error.expired": "Your session expired; please sign in again.",
    "part.duration": "{seconds} seconds",
  },
  tr: {
    "app.title": "Sesli Kütüphane",
    "app.skip": "Ana içeriğe geç",
    "nav.home": "Anasayfa",
    "nav.login": "Giriş",
    "nav.apply": "Üyelik başvurusu",
    "nav.volunteer": "Gönüllü masası",
    "nav.impaired": "Kütüphanem",
    "nav.admin": "Yönetim",
    "nav.messages": "Mesajlar",
    "nav.upload": "Kayıt yükle",
    "nav.logout": "Çıkış",
    "status.loading": "Yükleniyor…",
    "status.saved": "Kaydedildi.",
    "home.news": "Haberler ve duyurular",
    "home.links": "Bağlantılar",
    "home.guestbook": "Ziyaretçi defteri",
    "home.guestbook.name": "Adınız",
    "home.guestbook.body": "Mesajınız",
    "home.guestbook.sign": "Deftere yaz",
    "home.guestbook.signed": "Teşekkürler, notunuz ziyaretçi defterinde.",
    "home.empty": "Henüz yayın yok.",
    "login.title": "Giriş",
    "login.username": "Kullanıcı adı",
    "login.password": "Şifre",
    "login.submit": "Giriş yap",
    "login.welcome": "{name} olarak giriş yapıldı.",
    "login.forgot": "Şifremi unuttum",
    "login.reset.sent": "Hesap varsa sıfırlama notu oluşturuldu.",
    "login.reset.name": "Kullanıcı adı veya e-posta",
    "login.reset.submit": "Şifre sıfırlama iste",
    "apply.title": "Üyelik başvurusu",
    "apply.role": "Başvuru türü",
    "apply.role.volunteer": "Gönüllü okuyucu",
    "apply.role.impaired": "Görme engelli üye",
    "apply.name": "Ad soyad",
    "apply.email": "E-posta adresi",
    "apply.username": "İstenen kullanıcı adı",
    "apply.trial": "Bir dakikalık deneme kaydı (MP3)",
    "apply.trial.hint": "Gönüllü başvurularında deneme kaydı zorunludur.",
    "apply.submit": "Başvuruyu gönder",
    "apply.submitted": "Başvuru alındı. Yöneticiler bilgilerinizi e-posta ile gönderecek.",
    "volunteer.title": "Gönüllü masası",
    "volunteer.demand": "Okuyucu bekleyen kitaplar",
    "volunteer.demand.empty": "Şu anda bekleyen kitap yok.",
    "volunteer.claim": "{title} kitabını seslendirmek istiyorum",
    "volunteer.claimed": "Talep iletildi; yönetici onayı bekleniyor.",
    "volunteer.assignments": "Size atanan kitaplar",
    "volunteer.assignments.empty": "Henüz atanmış kitap yok.",
    "volunteer.upload": "{title} için bölüm yükle",
    "impaired.title": "Kütüphanem",
    "impaired.search": "Kitap bul",
    "impaired.search.label": "Katalogda ad veya yazara göre ara",
    "impaired.request": "Seslendirilmesini istediğiniz kitap",
    "impaired.request.title": "Kitap adı",
    "impaired.request.author": "Yazarı",
    "impaired.request.submit": "Talebi gönder",
    "impaired.requested": "Talep kaydedildi. Gönüllüler artık görebilir.",
    "impaired.mine": "Talepleriniz",
    "impaired.mine.empty": "Henüz kitap talebiniz yok.",
    "impaired.recent": "Son eklenen bölümler",
    "impaired.mostly": "En çok okunan kitaplar",
    "account.title": "Hesap ayarları",
    "account.username": "Yeni kullanıcı adı",
    "account.password": "Yeni şifre (en az 8 karakter)",
    "account.submit": "Bilgileri güncelle",
    "account.updated": "Bilgiler güncellendi.",
    "admin.title": "Yönetim",
    "admin.applications": "Üyelik başvuruları",
    "admin.claims": "Seslendirme talepleri",
    "admin.parts": "Gelen bölümler",
    "admin.queue.empty": "Kuyruk boş.",
    "admin.approve": "Onayla",
    "admin.reject": "Reddet",
    "admin.trial.listen": "Deneme kaydını dinle",
    "admin.decided": "Karar uygulandı.",
    "admin.credentials": "{name} için hesap açıldı; bilgiler e-posta kuyruğunda.",
    "admin.publish": "Anasayfada yayınla",
    "admin.publish.kind": "Tür",
    "admin.publish.title": "Başlık",
    "admin.publish.body": "Metin veya bağlantı adresi",
    "admin.publish.submit": "Yayınla",
    "admin.published": "Yayınlandı.",
    "admin.retract": "{title} yayını kaldır",
    "admin.guestbook": "Ziyaretçi defteri yönetimi",
    "admin.hide": "Kaydı gizle",
    "admin.show": "Kaydı göster",
    "admin.complete.book": "Tamamlanan kitabın kodu",
    "admin.complete.submit": "Kitabı tamamlandı işaretle",
    "admin.completed": "Kitap tamamlandı olarak işaretlendi.",
    "book.title": "Kitap: {title}",
    "book.parts": "Onaylanmış bölümler",
    "book.parts.empty": "Henüz onaylı bölüm yok.",
    "book.listen": "{name} bölümünü dinle",
    "book.download": "{name} bölümünü indir",
    "player.title": "Şimdi çalıyor",
    "player.of": "{title} kitabından",
    "player.blocked": "Bu bölüm yayında değil.",
    "player.download": "Bu bölümü indir",
    "upload.title": "Kayıtlı bölüm yükle",
    "upload.book": "Kitap",
    "upload.book.label": "Atanan kitabı seçin",
    "upload.part.name": "Bölüm adı",
    "upload.file": "Ses dosyası (MP3)",
    "upload.start": "Yüklemeyi başlat",
    "upload.pause": "Duraklat",
    "upload.resume": "Devam et",
    "upload.progress": "Yükleme ilerlemesi",
    "upload.sent": "{code} numaralı bölüm onaya gönderildi.",
    "upload.paused": "Yükleme duraklatıldı.",
    "messages.title": "Mesajlar",
    "messages.inbox": "Gelen kutusu",
    "messages.empty": "Mesaj yok.",
    "messages.unread": "{n} okunmamış mesaj",
    "messages.to": "Alıcı (kullanıcı adı)",
    "messages.body": "Mesaj",
    "messages.send": "Mesaj gönder",
    "messages.sent": "Mesaj gönderildi.",
    "friends.title": "Arkadaş listesi",
    "friends.empty": "Arkadaş listeniz boş.",
    "friends.add": "Arkadaş ekle (kullanıcı adı)",
    "friends.submit": "Listeye ekle",
    "friends.added": "Arkadaş listenize eklendi.",
    "error.prefix": "Hata: {detail}",
    "error.expired": "Oturum süresi doldu; lütfen tekrar giriş yapın.",
    "part.duration": "{seconds} saniye",
  },
};

let active: Locale = "en";

/** Pick the startup locale from the browser settings. */
export function detectLocale(language?: string): Locale {
  const lang = (language ?? navigator.language ?? "en").toLowerCase();
  return lang.startsWith("tr") ? "tr" : "en";
}

export function setLocale(locale: Locale): void {
  active = locale;
  document.documentElement.lang = locale;
}

export function getLocale(): Locale {
  return active;
}

/** Translate a key, interpolating {name} placeholders. */
export function t(key: string, params?: Record<string, string | number>): string {
  const template = bundles[active][key] ?? bundles.en[key] ?? key;
  if (!params) return template;
  return template.replace(/\{(\w+)\}/g, (_, name: string) =>
    String(params[name] ?? `{${name}}`));
}
